#![allow(dead_code)]

use omcs::arrangements::{named_instance, InstanceStructure};
use omcs::axioms::{contract, delete, OrientedStructure};
use omcs::program::AffineOM;
use omcs::{ElementSet, SignSystem, SignVector};

/// An instance of the desk-scale suite.
pub struct Case {
    pub key: String,
    pub structure: InstanceStructure,
}

impl Case {
    pub fn system(&self) -> SignSystem {
        match &self.structure {
            InstanceStructure::Om(m) => m.system().clone(),
            InstanceStructure::Affine(a) => a.system(),
        }
    }

    pub fn topes(&self) -> Vec<SignVector> {
        match &self.structure {
            InstanceStructure::Om(m) => m.topes().to_vec(),
            InstanceStructure::Affine(a) => a.topes(),
        }
    }

    pub fn om(&self) -> Option<&OrientedStructure> {
        match &self.structure {
            InstanceStructure::Om(m) => Some(m),
            InstanceStructure::Affine(_) => None,
        }
    }

    pub fn affine(&self) -> Option<&AffineOM> {
        match &self.structure {
            InstanceStructure::Affine(a) => Some(a),
            InstanceStructure::Om(_) => None,
        }
    }

    /// OM rank, or the rank of the affine space for affine instances.
    pub fn rank(&self) -> usize {
        match &self.structure {
            InstanceStructure::Om(m) => m.om_rank().unwrap(),
            InstanceStructure::Affine(a) => a.rank().unwrap(),
        }
    }
}

fn named(key: &str) -> Case {
    Case {
        key: key.to_string(),
        structure: named_instance(key).unwrap().structure,
    }
}

fn minor(key: &str, contraction: bool) -> Case {
    let base = named_instance(key).unwrap();
    let system = base.system();
    let (label, system) = if contraction {
        (format!("{key}/1"), contract(&system, 0).unwrap())
    } else {
        (format!("{key}\\1"), delete(&system, ElementSet::singleton(0)).unwrap())
    };
    Case {
        key: label,
        structure: InstanceStructure::Om(OrientedStructure::om(system).unwrap()),
    }
}

pub fn om_keys() -> Vec<String> {
    let mut keys: Vec<String> = (3..=6).map(|n| format!("cycle({n})")).collect();
    keys.extend((1..=3).map(|n| format!("cube({n})")));
    keys.extend((4..=6).map(|n| format!("unif(3,{n})")));
    keys
}

pub fn affine_keys() -> Vec<String> {
    let mut keys = vec!["tri".to_string()];
    keys.extend((2..=6).map(|k| format!("path({k})")));
    keys
}

/// Named instances plus simple single-element deletions and contractions of some of them.
pub fn suite() -> Vec<Case> {
    let mut cases: Vec<Case> = om_keys().iter().chain(&affine_keys()).map(|k| named(k)).collect();
    // Contracting an element of a rank 2 OM leaves parallel elements, so cycles only get deletions.
    for key in ["cycle(4)", "cycle(5)"] {
        cases.push(minor(key, false));
    }
    for key in ["cube(3)", "unif(3,4)", "unif(3,5)"] {
        cases.push(minor(key, false));
        cases.push(minor(key, true));
    }
    cases
}

/// The OM instances of the suite.
pub fn om_suite() -> Vec<Case> {
    suite().into_iter().filter(|c| c.om().is_some()).collect()
}
