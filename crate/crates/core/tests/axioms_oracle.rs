mod common;

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use omcs::arrangements::{named_instance, om_from_vectors, RationalMatrix};
use omcs::axioms::{classify_system, contract, delete, rank, upset, OrientedStructure, Verdict};
use omcs::{ElementSet, SignSystem, SignVector};
use proptest::prelude::*;

/// Axiom checks written directly on tokens.
struct Oracle {
    tokens: Vec<Vec<char>>,
    set: HashSet<Vec<char>>,
}

impl Oracle {
    fn new(system: &SignSystem) -> Self {
        let tokens: Vec<Vec<char>> = system
            .vectors()
            .iter()
            .map(|v| v.to_token().chars().collect())
            .collect();
        let set = tokens.iter().cloned().collect();
        Oracle { tokens, set }
    }

    fn neg(x: &[char]) -> Vec<char> {
        x.iter()
            .map(|c| match c {
                '+' => '-',
                '-' => '+',
                _ => '0',
            })
            .collect()
    }

    fn comp(x: &[char], y: &[char]) -> Vec<char> {
        x.iter().zip(y).map(|(a, b)| if *a == '0' { *b } else { *a }).collect()
    }

    fn composition(&self) -> bool {
        self.tokens
            .iter()
            .all(|x| self.tokens.iter().all(|y| self.set.contains(&Self::comp(x, y))))
    }

    fn symmetry(&self) -> bool {
        self.tokens.iter().all(|x| self.set.contains(&Self::neg(x)))
    }

    fn face_symmetry(&self) -> bool {
        self.tokens.iter().all(|x| {
            self.tokens
                .iter()
                .all(|y| self.set.contains(&Self::comp(x, &Self::neg(y))))
        })
    }

    fn strong_elimination(&self) -> bool {
        for x in &self.tokens {
            for y in &self.tokens {
                let sep: Vec<usize> = (0..x.len())
                    .filter(|&i| x[i] != '0' && y[i] != '0' && x[i] != y[i])
                    .collect();
                let w = Self::comp(x, y);
                for &e in &sep {
                    let found = self
                        .tokens
                        .iter()
                        .any(|z| z[e] == '0' && (0..x.len()).filter(|i| !sep.contains(i)).all(|i| z[i] == w[i]));
                    if !found {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn verdict(&self) -> Verdict {
        let (c, se) = (self.composition(), self.strong_elimination());
        if c && se && self.symmetry() {
            Verdict::Om
        } else if c && se && self.face_symmetry() {
            Verdict::ComNotOm
        } else {
            Verdict::Neither
        }
    }
}

fn check_against_oracle(system: &SignSystem) {
    let got = classify_system(system).unwrap();
    let oracle = Oracle::new(system);
    assert_eq!(got.composition, oracle.composition());
    assert_eq!(got.symmetry, oracle.symmetry());
    assert_eq!(got.face_symmetry, oracle.face_symmetry());
    assert_eq!(got.strong_elimination, oracle.strong_elimination());
    assert_eq!(got.verdict, oracle.verdict());
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn classification_matches_oracle_on_subsystems(key in prop_oneof![Just("cycle(3)"), Just("cube(2)"), Just("tri"), Just("path(3)")], mask in any::<u64>()) {
        let system = named_instance(key).unwrap().system();
        let kept: Vec<SignVector> = system
            .vectors()
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> (i % 64) & 1 == 1 || *i >= 64)
            .map(|(_, v)| *v)
            .collect();
        prop_assume!(!kept.is_empty());
        check_against_oracle(&SignSystem::new(system.ground().clone(), kept).unwrap());
    }

    #[test]
    fn random_realizations_give_covectors(x in proptest::collection::vec(-20i64..=20, 3)) {
        // Sign patterns of linear functionals are covectors of the realized OM.
        let cols: Vec<Vec<i64>> = (0..5).map(|i| vec![1, i, i * i]).collect();
        let m = RationalMatrix::from_columns(&cols.iter().map(|c| c.iter().map(|&v| int(v)).collect()).collect::<Vec<_>>()).unwrap();
        let om = om_from_vectors(&m).unwrap();
        let token: String = cols
            .iter()
            .map(|c| match c.iter().zip(&x).map(|(a, b)| a * b).sum::<i64>().signum() {
                1 => '+',
                -1 => '-',
                _ => '0',
            })
            .collect();
        prop_assert!(om.system().contains(&SignVector::parse_token(&token).unwrap()));
    }
}

#[test]
fn suite_instances_classify_as_expected() {
    for case in common::suite() {
        let c = classify_system(&case.system()).unwrap();
        let expected = if case.om().is_some() {
            Verdict::Om
        } else {
            Verdict::ComNotOm
        };
        assert_eq!(c.verdict, expected, "{}", case.key);
    }
}

#[test]
fn small_instances_agree_with_oracle() {
    for key in ["cycle(3)", "cycle(4)", "cube(2)", "tri", "paper4", "path(4)"] {
        check_against_oracle(&named_instance(key).unwrap().system());
    }
}

#[test]
fn removing_a_covector_breaks_the_axioms() {
    let system = named_instance("cycle(3)").unwrap().system();
    for skip in 0..system.len() {
        let kept: Vec<SignVector> = system
            .vectors()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .map(|(_, v)| *v)
            .collect();
        let reduced = SignSystem::new(system.ground().clone(), kept).unwrap();
        assert_ne!(classify_system(&reduced).unwrap().verdict, Verdict::Om);
    }
}

#[test]
fn rank_matches_matrix_rank() {
    for (key, expected) in [("cycle(4)", 2), ("cube(3)", 3), ("unif(3,5)", 3), ("paper4", 2)] {
        let inst = named_instance(key).unwrap();
        assert_eq!(rank(&inst.system()).unwrap(), expected, "{key}");
    }
    let m = RationalMatrix::parse("3 4\n1 0 1 1\n0 1 1 2\n1 1 2 3\n").unwrap();
    assert_eq!(m.rank(), 2);
    assert_eq!(om_from_vectors(&m).unwrap().om_rank().unwrap(), 2);
}

#[test]
fn standard_basis_gives_the_full_cube() {
    let om = named_instance("cube(3)").unwrap();
    assert_eq!(om.system().len(), 27);
    assert_eq!(om.topes().len(), 8);
}

#[test]
fn parallel_columns_are_not_simple() {
    let m = RationalMatrix::from_integers(2, 3, &[1, 1, 0, 2, 2, 1]).unwrap();
    let om = om_from_vectors(&m).unwrap();
    assert!(om.is_om());
    assert!(!om.classification().is_simple);
}

#[test]
fn all_zero_matrix_is_degenerate() {
    let m = RationalMatrix::from_integers(2, 2, &[0, 0, 0, 0]).unwrap();
    assert!(om_from_vectors(&m).is_err());
}

#[test]
fn four_point_instance_counts() {
    let inst = named_instance("paper4").unwrap();
    assert_eq!(inst.system().len(), 17);
    let topes: Vec<String> = inst.topes().iter().map(|t| t.to_token()).collect();
    assert_eq!(topes, ["++++", "+++-", "++--", "+---", "-+++", "--++", "---+", "----"]);
}

#[test]
fn minors_of_oms_are_oms() {
    for case in common::om_suite() {
        let system = case.system();
        for e in 0..system.ground_len() {
            let d = delete(&system, ElementSet::singleton(e)).unwrap();
            let c = contract(&system, e).unwrap();
            assert!(classify_system(&d).unwrap().is_om(), "{} deletion {e}", case.key);
            assert!(classify_system(&c).unwrap().is_om(), "{} contraction {e}", case.key);
        }
    }
}

#[test]
fn upsets_of_covectors_are_oms() {
    // L̄(X) is an OM for every covector X of a COM.
    for key in ["tri", "path(4)", "cube(2)"] {
        let system = named_instance(key).unwrap().system();
        for x in system.vectors() {
            let u = upset(&system, x).unwrap();
            assert!(OrientedStructure::om(u.system.clone()).is_ok(), "{key} at {x}");
        }
    }
}
