mod common;

use std::collections::{BTreeSet, HashSet};

use omcs::arrangements::named_instance;
use omcs::axioms::{classify_system, delete, OrientedStructure};
use omcs::extensions::{
    com_corner_peeling, com_corner_peeling_with_budget, covectors_from_topes, extend_by_localization, find_corner,
    is_general_position, Localization,
};
use omcs::{ElementSet, Error, Sign, SignSystem, SignVector};

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Element orders: every permutation for small ground sets, rotations of both directions otherwise.
fn orders(n: usize) -> Vec<Vec<usize>> {
    if n <= 4 {
        return permutations(n);
    }
    let mut out = Vec::new();
    for r in 0..n {
        let forward: Vec<usize> = (0..n).map(|i| (i + r) % n).collect();
        let mut backward = forward.clone();
        backward.reverse();
        out.push(forward);
        out.push(backward);
    }
    out
}

fn full_lex_sequences(n: usize) -> Vec<Vec<(usize, Sign)>> {
    let mut out = Vec::new();
    for order in orders(n) {
        for signs in 0u32..(1 << n) {
            out.push(
                order
                    .iter()
                    .enumerate()
                    .map(|(i, &e)| (e, if signs >> i & 1 == 1 { Sign::Minus } else { Sign::Plus }))
                    .collect(),
            );
        }
    }
    out
}

/// Isometry of an induced subgraph of the hypercube, checked with BFS.
fn isometric(vs: &[SignVector]) -> bool {
    let index: std::collections::HashMap<SignVector, usize> = vs.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    for (s, start) in vs.iter().enumerate() {
        let mut dist = vec![usize::MAX; vs.len()];
        dist[s] = 0;
        let mut queue = std::collections::VecDeque::from([*start]);
        while let Some(u) = queue.pop_front() {
            let du = dist[index[&u]];
            for e in 0..u.len() {
                if let Some(&j) = index.get(&u.reorient(e)) {
                    if dist[j] == usize::MAX {
                        dist[j] = du + 1;
                        queue.push_back(vs[j]);
                    }
                }
            }
        }
        if vs.iter().enumerate().any(|(j, v)| dist[j] != start.sep(v).len()) {
            return false;
        }
    }
    true
}

#[test]
fn covectors_are_recovered_from_topes() {
    for case in common::suite() {
        let system = case.system();
        let topes = SignSystem::new(system.ground().clone(), system.topes()).unwrap();
        let recovered = covectors_from_topes(&topes).unwrap();
        assert_eq!(recovered.vectors(), system.vectors(), "{}", case.key);
    }
}

#[test]
fn recovery_rejects_partial_vectors() {
    let s = SignSystem::from_vectors(2, ["+0".parse().unwrap()]).unwrap();
    assert!(matches!(covectors_from_topes(&s), Err(Error::RecoveryFailed(_))));
}

#[test]
fn lexicographic_extensions_round_trip() {
    let mut checked = 0;
    for case in common::om_suite() {
        let om = case.om().unwrap();
        let n = om.ground_len();
        for seq in full_lex_sequences(n) {
            let sigma = Localization::lex(om, &seq).unwrap();
            let ext = extend_by_localization(om, &sigma).unwrap();
            let back = delete(ext.system(), ElementSet::singleton(n)).unwrap();
            assert_eq!(back.vectors(), om.vectors(), "{} {seq:?}", case.key);
            // The localization read back off the extension is the one we started from.
            let read = Localization::from_deletion(&ext, n).unwrap();
            assert_eq!(read.assignment(), sigma.assignment(), "{} {seq:?}", case.key);
            checked += 1;
        }
    }
    assert!(checked > 1000);
}

#[test]
fn invalid_localizations_are_rejected() {
    // All cocircuits of a rank 2 OM set to + is not a localization: opposite cocircuits need opposite signs.
    let om = named_instance("cycle(3)").unwrap().system();
    let om = OrientedStructure::om(om).unwrap();
    let sigma = Localization::explicit(om.cocircuits().iter().map(|y| (*y, Sign::Plus)).collect());
    assert!(matches!(
        extend_by_localization(&om, &sigma),
        Err(Error::InvalidLocalization(_))
    ));
}

#[test]
fn extension_by_an_existing_element_is_not_in_general_position() {
    let om = OrientedStructure::om(named_instance("cycle(4)").unwrap().system()).unwrap();
    let n = om.ground_len();
    // Doubling element 0 lies on every cocircuit vanishing at 0.
    let sigma = Localization::explicit(om.cocircuits().iter().map(|y| (*y, y.get(0))).collect());
    let ext = extend_by_localization(&om, &sigma).unwrap();
    assert!(!is_general_position(&ext, n).unwrap());
}

#[test]
fn corner_shapes() {
    for n in 3..=6 {
        let om = OrientedStructure::om(named_instance(&format!("cycle({n})")).unwrap().system()).unwrap();
        let corner = find_corner(&om).unwrap();
        assert_eq!(corner.len(), n - 1, "cycle({n})");
        // n-1 consecutive vertices form a path.
        let g = omcs::tope_graph::TopeGraph::new(&corner.topes).unwrap();
        assert_eq!(g.edges().count(), n - 2);
    }
    for n in 1..=3 {
        let om = OrientedStructure::om(named_instance(&format!("cube({n})")).unwrap().system()).unwrap();
        assert_eq!(find_corner(&om).unwrap().len(), 1, "cube({n})");
    }
}

#[test]
fn corner_removal_keeps_the_embedding_isometric() {
    for case in common::om_suite() {
        let om = case.om().unwrap();
        let corner = find_corner(om).unwrap();
        let d: HashSet<SignVector> = corner.topes.iter().copied().collect();
        let rest: Vec<SignVector> = om.topes().iter().filter(|t| !d.contains(t)).copied().collect();
        assert!(!corner.is_empty() && !rest.is_empty(), "{}", case.key);
        assert!(isometric(&rest), "{}", case.key);
        // The rest is exactly the projection of one side of the extension.
        let side: BTreeSet<SignVector> = corner
            .remainder_lifts()
            .iter()
            .map(|t| t.delete(ElementSet::singleton(corner.new_element)))
            .collect();
        assert_eq!(side, rest.iter().copied().collect(), "{}", case.key);
    }
}

#[test]
fn peelings_partition_the_topes() {
    for case in common::suite() {
        let system = case.system();
        let steps = com_corner_peeling(&system).unwrap();
        let mut remaining: BTreeSet<SignVector> = system.topes().into_iter().collect();
        for step in &steps {
            assert!(step.removed.iter().all(|t| remaining.contains(t)), "{}", case.key);
            for t in &step.removed {
                remaining.remove(t);
            }
            if !remaining.is_empty() {
                let rest: Vec<SignVector> = remaining.iter().copied().collect();
                assert!(isometric(&rest), "{}", case.key);
                let rest = SignSystem::new(system.ground().clone(), rest).unwrap();
                assert!(classify_system(&covectors_from_topes(&rest).unwrap()).unwrap().is_com());
            }
        }
        assert!(remaining.is_empty(), "{}", case.key);
        assert!(steps.last().unwrap().corner.is_none());
        assert_eq!(steps.last().unwrap().removed.len(), 1);
    }
}

#[test]
fn exhausted_peeling_search_reports_no_peeling() {
    let system = named_instance("cycle(4)").unwrap().system();
    assert!(matches!(
        com_corner_peeling_with_budget(&system, 0),
        Err(Error::NoPeelingFound)
    ));
}
