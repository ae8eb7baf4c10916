//! Axiom checking and structural queries on sign systems.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::sign::{ElementSet, SignSystem, SignVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Om,
    ComNotOm,
    Neither,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Om => "OM",
            Verdict::ComNotOm => "COM_NOT_OM",
            Verdict::Neither => "NEITHER",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Classification {
    pub composition: bool,
    pub strong_elimination: bool,
    pub symmetry: bool,
    pub face_symmetry: bool,
    pub is_simple: bool,
    pub verdict: Verdict,
}

impl Classification {
    pub fn is_om(&self) -> bool {
        self.verdict == Verdict::Om
    }

    pub fn is_com(&self) -> bool {
        self.verdict != Verdict::Neither
    }
}

fn masks(v: &SignVector) -> (u64, u64) {
    (v.plus_set().bits(), v.minus_set().bits())
}

/// Checks (C), (SE), (Sym), (FS) and simplicity by exhaustive scans.
pub fn classify_system(system: &SignSystem) -> Result<Classification> {
    if system.is_empty() {
        return Err(Error::EmptySystem);
    }
    let vs = system.vectors();
    let members: HashSet<SignVector> = vs.iter().copied().collect();

    let symmetry = vs.iter().all(|x| members.contains(&-*x));
    let mut composition = true;
    let mut face_symmetry = true;
    'outer: for x in vs {
        for y in vs {
            if composition && !members.contains(&x.circ(y)) {
                composition = false;
            }
            if face_symmetry && !members.contains(&x.circ(&-*y)) {
                face_symmetry = false;
            }
            if !composition && !face_symmetry {
                break 'outer;
            }
        }
    }
    let strong_elimination = satisfies_strong_elimination(vs);
    let is_simple = is_simple(vs, system.ground_len());

    let verdict = if composition && strong_elimination && symmetry {
        Verdict::Om
    } else if composition && strong_elimination && face_symmetry {
        Verdict::ComNotOm
    } else {
        Verdict::Neither
    };
    Ok(Classification {
        composition,
        strong_elimination,
        symmetry,
        face_symmetry,
        is_simple,
        verdict,
    })
}

/// (SE): for every pair and every separating element `e` some `Z` has `Z_e = 0`
/// and agrees with `X∘Y` off the separator.
pub fn satisfies_strong_elimination(vs: &[SignVector]) -> bool {
    let bits: Vec<(u64, u64)> = vs.iter().map(masks).collect();
    for i in 0..vs.len() {
        for j in (i + 1)..vs.len() {
            let sep = vs[i].sep(&vs[j]).bits();
            if sep == 0 {
                continue;
            }
            let (wp, wm) = masks(&vs[i].circ(&vs[j]));
            let keep = !sep;
            let mut covered = 0u64;
            for &(zp, zm) in &bits {
                if ((zp ^ wp) | (zm ^ wm)) & keep == 0 {
                    covered |= sep & !(zp | zm);
                    if covered == sep {
                        break;
                    }
                }
            }
            if covered != sep {
                return false;
            }
        }
    }
    true
}

/// No element is constant, and no two elements are parallel or antiparallel.
pub fn is_simple(vs: &[SignVector], n: usize) -> bool {
    for e in 0..n {
        let mut seen = [false; 3];
        for v in vs {
            seen[v.get(e) as usize] = true;
        }
        if seen.iter().any(|s| !s) {
            return false;
        }
    }
    for e in 0..n {
        for f in (e + 1)..n {
            let mut agree = false;
            let mut disagree = false;
            for v in vs {
                let (a, b) = (v.get(e), v.get(f));
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                if a == b {
                    agree = true;
                } else {
                    disagree = true;
                }
                if agree && disagree {
                    break;
                }
            }
            if !(agree && disagree) {
                return false;
            }
        }
    }
    true
}

pub fn topes(system: &SignSystem) -> Vec<SignVector> {
    system.topes()
}

/// Minimal elements of the nonzero vectors under the conformal order.
pub fn cocircuits(vs: &[SignVector]) -> Vec<SignVector> {
    let nonzero: Vec<&SignVector> = vs.iter().filter(|v| !v.is_zero()).collect();
    nonzero
        .iter()
        .filter(|x| !nonzero.iter().any(|y| y.strictly_below(x)))
        .map(|x| **x)
        .collect()
}

/// Minimal elements of `vs` under the conformal order (zero included).
pub fn minimal_vectors(vs: &[SignVector]) -> Vec<SignVector> {
    vs.iter()
        .filter(|x| !vs.iter().any(|y| y.strictly_below(x)))
        .copied()
        .collect()
}

/// Cover relation of `(L, ≤)` computed by direct scan.
#[derive(Debug, Clone)]
pub struct CoverPoset {
    vectors: Vec<SignVector>,
    lower: Vec<Vec<usize>>,
    upper: Vec<Vec<usize>>,
}

impl CoverPoset {
    pub fn new(vectors: &[SignVector]) -> Self {
        let n = vectors.len();
        let mut lower = vec![Vec::new(); n];
        let mut upper = vec![Vec::new(); n];
        for (i, x) in vectors.iter().enumerate() {
            let below: Vec<usize> = (0..n).filter(|&j| vectors[j].strictly_below(x)).collect();
            for &j in &below {
                let y = &vectors[j];
                if !below.iter().any(|&k| y.strictly_below(&vectors[k])) {
                    lower[i].push(j);
                    upper[j].push(i);
                }
            }
        }
        CoverPoset {
            vectors: vectors.to_vec(),
            lower,
            upper,
        }
    }

    pub fn vectors(&self) -> &[SignVector] {
        &self.vectors
    }

    pub fn index_of(&self, v: &SignVector) -> Option<usize> {
        self.vectors.iter().position(|x| x == v)
    }

    pub fn lower_covers(&self, i: usize) -> &[usize] {
        &self.lower[i]
    }

    pub fn upper_covers(&self, i: usize) -> &[usize] {
        &self.upper[i]
    }

    /// Number of elements in the maximal chains; `NotGraded` if they differ.
    pub fn chain_length(&self) -> Result<usize> {
        let n = self.vectors.len();
        if n == 0 {
            return Err(Error::EmptySystem);
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| self.vectors[i].support().len());
        let mut hmin = vec![0usize; n];
        let mut hmax = vec![0usize; n];
        for &i in &order {
            if self.lower[i].is_empty() {
                hmin[i] = 1;
                hmax[i] = 1;
            } else {
                hmin[i] = 1 + self.lower[i].iter().map(|&j| hmin[j]).min().unwrap();
                hmax[i] = 1 + self.lower[i].iter().map(|&j| hmax[j]).max().unwrap();
            }
        }
        let tops: Vec<usize> = (0..n).filter(|&i| self.upper[i].is_empty()).collect();
        let shortest = tops.iter().map(|&i| hmin[i]).min().unwrap();
        let longest = tops.iter().map(|&i| hmax[i]).max().unwrap();
        if shortest != longest {
            return Err(Error::NotGraded { shortest, longest });
        }
        Ok(longest)
    }
}

/// Length of the maximal chains minus one, after checking gradedness.
pub fn rank(system: &SignSystem) -> Result<usize> {
    rank_of_vectors(system.vectors())
}

pub fn rank_of_vectors(vs: &[SignVector]) -> Result<usize> {
    Ok(CoverPoset::new(vs).chain_length()? - 1)
}

fn check_elements(system: &SignSystem, elements: ElementSet) -> Result<()> {
    if let Some(e) = elements.iter().find(|&e| e >= system.ground_len()) {
        return Err(Error::ElementNotFound(e));
    }
    Ok(())
}

pub fn delete(system: &SignSystem, removed: ElementSet) -> Result<SignSystem> {
    check_elements(system, removed)?;
    SignSystem::new(
        system.ground().delete(removed),
        system.vectors().iter().map(|v| v.delete(removed)),
    )
}

pub fn contract(system: &SignSystem, e: usize) -> Result<SignSystem> {
    let removed = ElementSet::singleton(e);
    check_elements(system, removed)?;
    SignSystem::new(
        system.ground().delete(removed),
        system
            .vectors()
            .iter()
            .filter(|v| v.get(e).is_zero())
            .map(|v| v.delete(removed)),
    )
}

/// `L̄(X)`: the vectors above `X` with the support of `X` removed.
#[derive(Debug, Clone)]
pub struct Upset {
    pub system: SignSystem,
    /// Original ids of the remaining coordinates, in order.
    pub kept: Vec<usize>,
    pub base: SignVector,
}

impl Upset {
    /// Maps a vector of the upset back to the vector above `base` it came from.
    pub fn lift(&self, y: &SignVector) -> SignVector {
        self.base.circ(&y.embed(&self.kept, self.base.len()))
    }

    /// Restricts a vector of the original system to the upset coordinates.
    pub fn project(&self, y: &SignVector) -> SignVector {
        y.restrict(&self.kept)
    }

    /// Translates an element set of the upset back to original ids.
    pub fn lift_elements(&self, set: ElementSet) -> ElementSet {
        set.iter().map(|e| self.kept[e]).collect()
    }
}

pub fn upset(system: &SignSystem, x: &SignVector) -> Result<Upset> {
    if !system.contains(x) {
        return Err(Error::VectorNotInSystem(x.to_string()));
    }
    Ok(upset_unchecked(system, x))
}

pub(crate) fn upset_unchecked(system: &SignSystem, x: &SignVector) -> Upset {
    let kept = x.zero_set().to_vec();
    let vectors: Vec<SignVector> = system
        .vectors()
        .iter()
        .filter(|y| x.below(y))
        .map(|y| y.restrict(&kept))
        .collect();
    let system =
        SignSystem::new(system.ground().restrict(&kept), vectors).expect("restriction keeps a common ground set");
    Upset { system, kept, base: *x }
}

/// A validated OM or COM with its topes, cocircuits and (for OMs) rank.
#[derive(Debug, Clone)]
pub struct OrientedStructure {
    system: SignSystem,
    classification: Classification,
    topes: Vec<SignVector>,
    cocircuits: Vec<SignVector>,
    rank: Option<usize>,
}

impl OrientedStructure {
    /// Classifies `system`; accepts OMs and COMs.
    pub fn new(system: SignSystem) -> Result<Self> {
        let classification = classify_system(&system)?;
        if !classification.is_com() {
            return Err(Error::NotOrientedStructure);
        }
        let rank = if classification.is_om() {
            Some(rank(&system)?)
        } else {
            None
        };
        let topes = system.topes();
        let cocircuits = cocircuits(system.vectors());
        Ok(OrientedStructure {
            system,
            classification,
            topes,
            cocircuits,
            rank,
        })
    }

    /// Accepts only oriented matroids.
    pub fn om(system: SignSystem) -> Result<Self> {
        let s = OrientedStructure::new(system)?;
        if !s.classification.is_om() {
            return Err(Error::NotAnOm(s.classification.verdict.to_string()));
        }
        Ok(s)
    }

    /// Accepts only simple oriented matroids.
    pub fn simple_om(system: SignSystem) -> Result<Self> {
        let s = OrientedStructure::om(system)?;
        if !s.classification.is_simple {
            return Err(Error::NotSimple);
        }
        Ok(s)
    }

    pub fn system(&self) -> &SignSystem {
        &self.system
    }

    pub fn vectors(&self) -> &[SignVector] {
        self.system.vectors()
    }

    pub fn ground_len(&self) -> usize {
        self.system.ground_len()
    }

    pub fn classification(&self) -> &Classification {
        &self.classification
    }

    pub fn is_om(&self) -> bool {
        self.classification.is_om()
    }

    pub fn topes(&self) -> &[SignVector] {
        &self.topes
    }

    pub fn cocircuits(&self) -> &[SignVector] {
        &self.cocircuits
    }

    /// Rank of an OM; `None` for COMs, which are not assigned one.
    pub fn rank(&self) -> Option<usize> {
        self.rank
    }

    pub fn om_rank(&self) -> Result<usize> {
        self.rank
            .ok_or_else(|| Error::NotAnOm(self.classification.verdict.to_string()))
    }

    pub fn delete(&self, removed: ElementSet) -> Result<SignSystem> {
        delete(&self.system, removed)
    }

    pub fn contract(&self, e: usize) -> Result<SignSystem> {
        contract(&self.system, e)
    }

    pub fn upset(&self, x: &SignVector) -> Result<Upset> {
        upset(&self.system, x)
    }
}
