//! Realizable samples, proper unlabeled compression schemes built from
//! reconstructible maps, scheme verification and the scheme document format.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::fmt::Write as _;

use serde::Deserialize;

use crate::error::{Error, ParseError, Result};
use crate::reconstruct::ReconstructibleMap;
use crate::sign::{ElementSet, GroundSet, SignVector};

/// `{s | s ≤ c for some c in topes}`, in canonical order.
pub fn realizable_samples(topes: &[SignVector]) -> Vec<SignVector> {
    let mut out: BTreeSet<SignVector> = BTreeSet::new();
    for t in topes {
        let supp = t.support().bits();
        let mut sub = supp;
        loop {
            let mut s = SignVector::zero(t.len());
            for e in ElementSet(sub).iter() {
                s.set(e, t.get(e));
            }
            out.insert(s);
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & supp;
        }
    }
    out.into_iter().collect()
}

/// Compressor `α` on realizable samples and reconstructor `β` on its image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressionScheme {
    pub universe: GroundSet,
    pub alpha: BTreeMap<SignVector, ElementSet>,
    pub beta: BTreeMap<ElementSet, SignVector>,
    pub declared_size: usize,
}

impl CompressionScheme {
    pub fn alpha(&self, s: &SignVector) -> Result<ElementSet> {
        self.alpha
            .get(s)
            .copied()
            .ok_or_else(|| Error::UnrealizableSample(s.to_string()))
    }

    pub fn beta(&self, v: ElementSet) -> Result<SignVector> {
        self.beta
            .get(&v)
            .copied()
            .ok_or_else(|| Error::UnknownImage(v.display_one_based()))
    }

    /// Largest image of `α`.
    pub fn max_image(&self) -> usize {
        self.alpha.values().map(|v| v.len()).max().unwrap_or(0)
    }
}

/// `α(s) = a(C_s)` with `C_s` the topes above `s`; `β(V)` the canonical fiber witness.
pub fn build_scheme(map: &ReconstructibleMap, universe: GroundSet) -> Result<CompressionScheme> {
    if universe.len() != map.ground_len() {
        return Err(Error::GroundMismatch {
            left: universe.len(),
            right: map.ground_len(),
        });
    }
    let topes: Vec<SignVector> = map.graph().vertices().iter().map(|t| map.lift_tope(t)).collect();
    let witnesses = map.witnesses();
    if witnesses.is_empty() {
        return Err(Error::InvalidArgument("map has not been verified".into()));
    }
    let mut alpha = BTreeMap::new();
    let mut beta = BTreeMap::new();
    for s in realizable_samples(&topes) {
        let members: Vec<SignVector> = topes.iter().filter(|t| s.below(t)).copied().collect();
        let v = map
            .image_of(&members)
            .ok_or_else(|| Error::InvariantViolated(format!("map has no image for the sample {s}")))?;
        let w = witnesses
            .get(&v)
            .copied()
            .ok_or_else(|| Error::UnknownImage(v.display_one_based()))?;
        alpha.insert(s, v);
        beta.insert(v, w);
    }
    Ok(CompressionScheme {
        universe,
        alpha,
        beta,
        declared_size: map.vc(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemeViolation {
    UniverseMismatch {
        scheme: usize,
        class: usize,
    },
    MissingAlpha {
        sample: SignVector,
    },
    TooLarge {
        sample: SignVector,
        image: ElementSet,
    },
    OutsideSupport {
        sample: SignVector,
        image: ElementSet,
    },
    MissingBeta {
        image: ElementSet,
    },
    NotReconstructed {
        sample: SignVector,
        image: ElementSet,
        tope: SignVector,
    },
    Improper {
        image: ElementSet,
        tope: SignVector,
    },
}

impl fmt::Display for SchemeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeViolation::UniverseMismatch { scheme, class } => {
                write!(f, "scheme has {scheme} elements but the class has {class}")
            }
            SchemeViolation::MissingAlpha { sample } => write!(f, "alpha({sample}) is undefined"),
            SchemeViolation::TooLarge { sample, image } => {
                write!(
                    f,
                    "alpha({sample}) = {} exceeds the size bound",
                    image.display_one_based()
                )
            }
            SchemeViolation::OutsideSupport { sample, image } => {
                write!(
                    f,
                    "alpha({sample}) = {} is not inside the support",
                    image.display_one_based()
                )
            }
            SchemeViolation::MissingBeta { image } => write!(f, "beta({}) is undefined", image.display_one_based()),
            SchemeViolation::NotReconstructed { sample, image, tope } => {
                write!(f, "{sample} is not below beta({}) = {tope}", image.display_one_based())
            }
            SchemeViolation::Improper { image, tope } => {
                write!(
                    f,
                    "beta({}) = {tope} is not a concept of the class",
                    image.display_one_based()
                )
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct SchemeReport {
    pub samples: usize,
    pub beta_entries: usize,
    pub max_image: usize,
    pub violations: Vec<SchemeViolation>,
}

impl SchemeReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `α(s) ⊆ supp(s)`, `|α(s)| ≤ k` and `s ≤ β(α(s))` for every realizable
/// sample, and that every `β` value is a tope of the class.
pub fn verify_scheme(topes: &[SignVector], scheme: &CompressionScheme, k: usize) -> SchemeReport {
    let mut violations = Vec::new();
    if let Some(t) = topes.first() {
        if t.len() != scheme.universe.len() {
            violations.push(SchemeViolation::UniverseMismatch {
                scheme: scheme.universe.len(),
                class: t.len(),
            });
            return SchemeReport {
                samples: 0,
                beta_entries: scheme.beta.len(),
                max_image: 0,
                violations,
            };
        }
    }
    let samples = realizable_samples(topes);
    let mut max_image = 0;
    for s in &samples {
        let Some(&v) = scheme.alpha.get(s) else {
            violations.push(SchemeViolation::MissingAlpha { sample: *s });
            continue;
        };
        max_image = max_image.max(v.len());
        if v.len() > k {
            violations.push(SchemeViolation::TooLarge { sample: *s, image: v });
        }
        if !v.is_subset(s.support()) {
            violations.push(SchemeViolation::OutsideSupport { sample: *s, image: v });
        }
        match scheme.beta.get(&v) {
            None => violations.push(SchemeViolation::MissingBeta { image: v }),
            Some(t) if !s.below(t) => violations.push(SchemeViolation::NotReconstructed {
                sample: *s,
                image: v,
                tope: *t,
            }),
            Some(_) => {}
        }
    }
    let class: HashSet<SignVector> = topes.iter().copied().collect();
    for (v, t) in &scheme.beta {
        if !class.contains(t) {
            violations.push(SchemeViolation::Improper { image: *v, tope: *t });
        }
    }
    violations.dedup();
    SchemeReport {
        samples: samples.len(),
        beta_entries: scheme.beta.len(),
        max_image,
        violations,
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    alpha: BTreeMap<String, Vec<usize>>,
    beta: Vec<BetaEntry>,
    size: usize,
    universe: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BetaEntry {
    set: Vec<usize>,
    tope: String,
}

fn id_list(v: ElementSet) -> String {
    let ids: Vec<String> = v.iter().map(|e| (e + 1).to_string()).collect();
    format!("[{}]", ids.join(", "))
}

fn quoted(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

/// Canonical scheme document: sorted keys, 1-based element ids, one entry per line.
pub fn export_scheme(scheme: &CompressionScheme) -> String {
    let mut out = String::from("{\n  \"alpha\": {\n");
    let n = scheme.alpha.len();
    for (i, (s, v)) in scheme.alpha.iter().enumerate() {
        let comma = if i + 1 < n { "," } else { "" };
        let _ = writeln!(out, "    {}: {}{comma}", quoted(&s.to_token()), id_list(*v));
    }
    out.push_str("  },\n  \"beta\": [\n");
    let n = scheme.beta.len();
    for (i, (v, t)) in scheme.beta.iter().enumerate() {
        let comma = if i + 1 < n { "," } else { "" };
        let _ = writeln!(
            out,
            "    {{\"set\": {}, \"tope\": {}}}{comma}",
            id_list(*v),
            quoted(&t.to_token())
        );
    }
    let names: Vec<String> = (0..scheme.universe.len())
        .map(|e| quoted(&scheme.universe.name(e)))
        .collect();
    let _ = write!(
        out,
        "  ],\n  \"size\": {},\n  \"universe\": [{}]\n}}\n",
        scheme.declared_size,
        names.join(", ")
    );
    out
}

pub fn import_scheme(text: &str) -> Result<CompressionScheme> {
    let doc: Document = serde_json::from_str(text).map_err(|e| ParseError::at(e.line(), e.column(), e.to_string()))?;
    let n = doc.universe.len();
    let universe = GroundSet::named(doc.universe)?;
    let to_set = |ids: &[usize], key: &str| -> Result<ElementSet> {
        let mut set = ElementSet::EMPTY;
        for &id in ids {
            if id == 0 || id > n {
                return Err(ParseError::new(format!("element id {id} out of range in {key}")).into());
            }
            set.insert(id - 1);
        }
        Ok(set)
    };
    let token = |t: &str, key: &str| -> Result<SignVector> {
        let v: SignVector = t
            .parse()
            .map_err(|_| ParseError::new(format!("invalid sign vector {t:?} in {key}")))?;
        if v.len() != n {
            return Err(ParseError::new(format!("{key}: {t:?} has {} coordinates, expected {n}", v.len())).into());
        }
        Ok(v)
    };
    let mut beta = BTreeMap::new();
    for entry in &doc.beta {
        let key = format!("beta entry {:?}", entry.set);
        let v = to_set(&entry.set, &key)?;
        let t = token(&entry.tope, &key)?;
        if beta.insert(v, t).is_some() {
            return Err(ParseError::new(format!("duplicate {key}")).into());
        }
    }
    let mut alpha = BTreeMap::new();
    for (s, ids) in &doc.alpha {
        let key = format!("alpha key {s:?}");
        let sample = token(s, &key)?;
        let v = to_set(ids, &key)?;
        if !beta.contains_key(&v) {
            return Err(ParseError::new(format!("{key}: image {} has no beta entry", v.display_one_based())).into());
        }
        alpha.insert(sample, v);
    }
    Ok(CompressionScheme {
        universe,
        alpha,
        beta,
        declared_size: doc.size,
    })
}
