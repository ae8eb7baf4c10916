//! Single-element extensions via localizations, general position, corners,
//! covector recovery from topes, and corner peelings of COMs.

use std::collections::{BTreeMap, HashSet};

use crate::axioms::{classify_system, cocircuits, delete, minimal_vectors, upset_unchecked, OrientedStructure, Upset};
use crate::error::{Error, Result};
use crate::sign::{ElementSet, Sign, SignSystem, SignVector};
use crate::tope_graph::TopeGraph;

/// Display name given to elements added by extensions.
pub const NEW_ELEMENT_NAME: &str = "f";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    /// Ordered signed element sequence `[e1^s1, .., ek^sk]`.
    Lex(Vec<(usize, Sign)>),
    Explicit,
}

/// Sign assignment on the cocircuits of an OM.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Localization {
    assignment: BTreeMap<SignVector, Sign>,
    provenance: Provenance,
}

impl Localization {
    /// `σ(Y) = s_i · Y_{e_i}` for the first `i` with `Y_{e_i} ≠ 0`, else zero.
    pub fn lex(om: &OrientedStructure, sequence: &[(usize, Sign)]) -> Result<Self> {
        if let Some(&(e, _)) = sequence.iter().find(|(e, _)| *e >= om.ground_len()) {
            return Err(Error::ElementNotFound(e));
        }
        let assignment = om
            .cocircuits()
            .iter()
            .map(|y| {
                let s = sequence
                    .iter()
                    .find(|(e, _)| !y.get(*e).is_zero())
                    .map_or(Sign::Zero, |(e, s)| *s * y.get(*e));
                (*y, s)
            })
            .collect();
        Ok(Localization {
            assignment,
            provenance: Provenance::Lex(sequence.to_vec()),
        })
    }

    /// The full lexicographic sequence `[first^sign, others ascending with +]`.
    pub fn lex_sequence(n: usize, first: usize, sign: Sign) -> Vec<(usize, Sign)> {
        let mut seq = vec![(first, sign)];
        seq.extend((0..n).filter(|&e| e != first).map(|e| (e, Sign::Plus)));
        seq
    }

    pub fn explicit(assignment: BTreeMap<SignVector, Sign>) -> Self {
        Localization {
            assignment,
            provenance: Provenance::Explicit,
        }
    }

    /// The localization read off an element `f` of a larger OM: `σ(Y)` is the
    /// `f`-coordinate of the cocircuit mapping to `Y` under deletion of `f`.
    pub fn from_deletion(larger: &OrientedStructure, f: usize) -> Result<Self> {
        if f >= larger.ground_len() {
            return Err(Error::ElementNotFound(f));
        }
        let removed = ElementSet::singleton(f);
        let deleted = delete(larger.system(), removed)?;
        let targets: HashSet<SignVector> = cocircuits(deleted.vectors()).into_iter().collect();
        let mut assignment = BTreeMap::new();
        for x in larger.vectors() {
            let y = x.delete(removed);
            if targets.contains(&y) {
                let s = x.get(f);
                if let Some(prev) = assignment.insert(y, s) {
                    if prev != s {
                        // A cocircuit lifting with two different signs lies on f.
                        assignment.insert(y, Sign::Zero);
                    }
                }
            }
        }
        Ok(Localization::explicit(assignment))
    }

    pub fn get(&self, y: &SignVector) -> Option<Sign> {
        self.assignment.get(y).copied()
    }

    pub fn assignment(&self) -> &BTreeMap<SignVector, Sign> {
        &self.assignment
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }
}

/// Extends `om` by a new last element according to `sigma`, validating the result.
pub fn extend_by_localization(om: &OrientedStructure, sigma: &Localization) -> Result<OrientedStructure> {
    let cocircuits = om.cocircuits();
    let mut signs = Vec::with_capacity(cocircuits.len());
    for y in cocircuits {
        let s = sigma
            .get(y)
            .ok_or_else(|| Error::InvalidLocalization(format!("no sign for cocircuit {y}")))?;
        signs.push((y, s));
    }
    let mut vectors = Vec::new();
    for z in om.vectors() {
        let (mut plus, mut minus) = (false, false);
        for (y, s) in &signs {
            if y.below(z) {
                match s {
                    Sign::Plus => plus = true,
                    Sign::Minus => minus = true,
                    Sign::Zero => {}
                }
            }
        }
        match (plus, minus) {
            (true, false) => vectors.push(z.push(Sign::Plus)),
            (false, true) => vectors.push(z.push(Sign::Minus)),
            (false, false) => vectors.push(z.push(Sign::Zero)),
            (true, true) => {
                for s in [Sign::Plus, Sign::Minus, Sign::Zero] {
                    vectors.push(z.push(s));
                }
            }
        }
    }
    let ground = om.system().ground().push(NEW_ELEMENT_NAME);
    let system = SignSystem::new(ground, vectors)?;
    let c = classify_system(&system)?;
    if !c.is_om() {
        return Err(Error::InvalidLocalization(format!(
            "extended system has verdict {} (C={}, SE={}, Sym={})",
            c.verdict, c.composition, c.strong_elimination, c.symmetry
        )));
    }
    OrientedStructure::om(system)
}

/// No cocircuit vanishing on `f` stays a cocircuit after deleting `f`.
pub fn is_general_position(ext: &OrientedStructure, f: usize) -> Result<bool> {
    if f >= ext.ground_len() {
        return Err(Error::ElementNotFound(f));
    }
    let removed = ElementSet::singleton(f);
    let deleted = delete(ext.system(), removed)?;
    let below: HashSet<SignVector> = cocircuits(deleted.vectors()).into_iter().collect();
    Ok(!ext
        .cocircuits()
        .iter()
        .any(|x| x.get(f).is_zero() && below.contains(&x.delete(removed))))
}

/// A corner of an OM together with the extension defining it.
#[derive(Debug, Clone)]
pub struct CornerRecord {
    /// Corner topes, in canonical order.
    pub topes: Vec<SignVector>,
    pub extension: OrientedStructure,
    pub new_element: usize,
    /// `topes = T(M) \ {X\f | X_f = side}`.
    pub side: Sign,
}

impl CornerRecord {
    pub fn len(&self) -> usize {
        self.topes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.topes.is_empty()
    }

    pub fn contains(&self, t: &SignVector) -> bool {
        self.topes.binary_search(t).is_ok()
    }

    /// Topes of the extension on the `side` of the new element.
    pub fn remainder_lifts(&self) -> Vec<SignVector> {
        self.extension
            .topes()
            .iter()
            .filter(|t| t.get(self.new_element) == self.side)
            .copied()
            .collect()
    }
}

pub fn corner_from_extension(
    om: &OrientedStructure,
    ext: &OrientedStructure,
    f: usize,
    side: Sign,
) -> Result<CornerRecord> {
    if side.is_zero() {
        return Err(Error::InvalidArgument("corner side must be + or -".into()));
    }
    if !is_general_position(ext, f)? {
        return Err(Error::NotGeneralPosition(f));
    }
    let removed = ElementSet::singleton(f);
    let rest: HashSet<SignVector> = ext
        .topes()
        .iter()
        .filter(|t| t.get(f) == side)
        .map(|t| t.delete(removed))
        .collect();
    let topes: Vec<SignVector> = om.topes().iter().filter(|t| !rest.contains(t)).copied().collect();
    let remaining: Vec<SignVector> = om.topes().iter().filter(|t| rest.contains(t)).copied().collect();
    if remaining.len() != rest.len() {
        return Err(Error::InvariantViolated(
            "extension topes do not project onto topes of the base".into(),
        ));
    }
    if !TopeGraph::is_isometric_subset(&remaining) {
        return Err(Error::InvariantViolated(
            "removing the corner breaks the isometric embedding".into(),
        ));
    }
    Ok(CornerRecord {
        topes,
        extension: ext.clone(),
        new_element: f,
        side,
    })
}

/// First general-position full lexicographic extension in canonical order; `+` side corner.
pub fn find_corner(om: &OrientedStructure) -> Result<CornerRecord> {
    let n = om.ground_len();
    for e in 0..n {
        for s in [Sign::Plus, Sign::Minus] {
            let sigma = Localization::lex(om, &Localization::lex_sequence(n, e, s))?;
            let ext = match extend_by_localization(om, &sigma) {
                Ok(ext) => ext,
                Err(Error::InvalidLocalization(_)) => continue,
                Err(err) => return Err(err),
            };
            if is_general_position(&ext, n)? {
                return corner_from_extension(om, &ext, n, Sign::Plus);
            }
        }
    }
    Err(Error::NoCornerFound)
}

/// `{X | X∘T ∈ T and X∘-T ∈ T for all topes T}`, validated as an OM or COM.
pub fn covectors_from_topes(topes: &SignSystem) -> Result<SignSystem> {
    let ts: Vec<SignVector> = topes.vectors().to_vec();
    if ts.is_empty() {
        return Err(Error::EmptySystem);
    }
    if let Some(t) = ts.iter().find(|t| !t.is_tope()) {
        return Err(Error::RecoveryFailed(format!("{t} does not have full support")));
    }
    let members: HashSet<SignVector> = ts.iter().copied().collect();
    let mut candidates: HashSet<SignVector> = HashSet::new();
    for t in &ts {
        let supp = t.support().bits();
        let mut sub = supp;
        loop {
            let plus = t.plus_set().bits() & sub;
            let minus = t.minus_set().bits() & sub;
            candidates.insert(SignVector::from_sets(t.len(), ElementSet(plus), ElementSet(minus))?);
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & supp;
        }
    }
    let recovered: Vec<SignVector> = candidates
        .into_iter()
        .filter(|x| {
            ts.iter()
                .all(|t| members.contains(&x.circ(t)) && members.contains(&x.circ(&-*t)))
        })
        .collect();
    let system = SignSystem::new(topes.ground().clone(), recovered)?;
    let c = classify_system(&system)?;
    if !c.is_com() {
        return Err(Error::RecoveryFailed(format!(
            "recovered system has verdict {} (C={}, SE={}, FS={})",
            c.verdict, c.composition, c.strong_elimination, c.face_symmetry
        )));
    }
    Ok(system)
}

/// One corner of a peeling: the cell it lies in and the topes it removes.
#[derive(Debug, Clone)]
pub struct PeelStep {
    /// Minimal covector whose upset is the unique maximal cell containing the corner.
    pub cell_base: SignVector,
    pub cell: Upset,
    /// `None` for the final single-tope step.
    pub corner: Option<CornerRecord>,
    /// Removed topes in original coordinates, canonical order.
    pub removed: Vec<SignVector>,
}

/// Search budget (number of candidate corners examined) for peeling.
pub const DEFAULT_PEEL_BUDGET: usize = 20_000;

pub fn com_corner_peeling(system: &SignSystem) -> Result<Vec<PeelStep>> {
    com_corner_peeling_with_budget(system, DEFAULT_PEEL_BUDGET)
}

/// Greedy search with backtracking for a partition of the topes into successive corners.
pub fn com_corner_peeling_with_budget(system: &SignSystem, budget: usize) -> Result<Vec<PeelStep>> {
    let c = classify_system(system)?;
    if !c.is_com() {
        return Err(Error::NotOrientedStructure);
    }
    let mut steps = Vec::new();
    let mut remaining = budget;
    if peel(system, &mut steps, &mut remaining)? {
        Ok(steps)
    } else {
        Err(Error::NoPeelingFound)
    }
}

fn peel(current: &SignSystem, steps: &mut Vec<PeelStep>, budget: &mut usize) -> Result<bool> {
    let topes = current.topes();
    if topes.len() == 1 {
        let t = topes[0];
        steps.push(PeelStep {
            cell_base: t,
            cell: upset_unchecked(current, &t),
            corner: None,
            removed: topes,
        });
        return Ok(true);
    }
    let cells = maximal_cells(current, &topes);
    let mut tried: HashSet<Vec<SignVector>> = HashSet::new();
    for (ci, (base, cell_topes)) in cells.iter().enumerate() {
        let cell = upset_unchecked(current, base);
        let cell_om = match OrientedStructure::om(cell.system.clone()) {
            Ok(om) => om,
            Err(_) => continue,
        };
        for candidate in cell_corners(&cell_om)? {
            if *budget == 0 {
                return Ok(false);
            }
            *budget -= 1;
            let removed: Vec<SignVector> = {
                let mut r: Vec<SignVector> = candidate.topes.iter().map(|t| cell.lift(t)).collect();
                r.sort();
                r
            };
            if !tried.insert(removed.clone()) {
                continue;
            }
            let removed_set: HashSet<SignVector> = removed.iter().copied().collect();
            let meets_other = cells
                .iter()
                .enumerate()
                .any(|(cj, (_, other))| cj != ci && other.iter().any(|t| removed_set.contains(t)));
            if meets_other || removed.len() >= topes.len() {
                continue;
            }
            debug_assert!(removed.iter().all(|t| cell_topes.contains(t)));
            let rest: Vec<SignVector> = topes.iter().filter(|t| !removed_set.contains(t)).copied().collect();
            if !TopeGraph::is_isometric_subset(&rest) {
                continue;
            }
            let rest_system = SignSystem::new(current.ground().clone(), rest)?;
            let next = match covectors_from_topes(&rest_system) {
                Ok(next) => next,
                Err(Error::RecoveryFailed(_)) => continue,
                Err(e) => return Err(e),
            };
            steps.push(PeelStep {
                cell_base: *base,
                cell: cell.clone(),
                corner: Some(candidate),
                removed,
            });
            if peel(&next, steps, budget)? {
                return Ok(true);
            }
            steps.pop();
        }
    }
    Ok(false)
}

/// Inclusion-maximal tope sets `T(X)` over minimal covectors `X`, in canonical order of `X`.
pub fn maximal_cells(system: &SignSystem, topes: &[SignVector]) -> Vec<(SignVector, Vec<SignVector>)> {
    let mut cells: Vec<(SignVector, Vec<SignVector>)> = minimal_vectors(system.vectors())
        .into_iter()
        .map(|x| (x, topes.iter().filter(|t| x.below(t)).copied().collect()))
        .collect();
    cells.sort();
    let snapshot = cells.clone();
    cells.retain(|(x, ts)| {
        !snapshot.iter().any(|(y, us)| {
            y != x && us.len() >= ts.len() && ts.iter().all(|t| us.contains(t)) && (us.len() > ts.len() || y < x)
        })
    });
    cells
}

/// Candidate corners of an OM cell: full lex extensions in canonical order, both sides.
fn cell_corners(om: &OrientedStructure) -> Result<Vec<CornerRecord>> {
    let n = om.ground_len();
    let mut out = Vec::new();
    let mut seen: HashSet<Vec<SignVector>> = HashSet::new();
    for e in 0..n {
        for s in [Sign::Plus, Sign::Minus] {
            let sigma = Localization::lex(om, &Localization::lex_sequence(n, e, s))?;
            let ext = match extend_by_localization(om, &sigma) {
                Ok(ext) => ext,
                Err(Error::InvalidLocalization(_)) => continue,
                Err(err) => return Err(err),
            };
            if !is_general_position(&ext, n)? {
                continue;
            }
            for side in [Sign::Plus, Sign::Minus] {
                match corner_from_extension(om, &ext, n, side) {
                    Ok(c) => {
                        if seen.insert(c.topes.clone()) {
                            out.push(c);
                        }
                    }
                    Err(Error::InvariantViolated(_)) => {}
                    Err(err) => return Err(err),
                }
            }
        }
    }
    Ok(out)
}
