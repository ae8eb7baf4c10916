//! Reconstructible maps on tope graphs: the corner map, corner extensions,
//! the affine recursion through OM programs, OMs and COMs with corner
//! peelings, and the verifier.

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::rc::Rc;

use crate::axioms::{contract, OrientedStructure};
use crate::error::{ensure, Error, Result};
use crate::extensions::{
    com_corner_peeling, extend_by_localization, find_corner, is_general_position, CornerRecord, Localization,
};
use crate::program::{
    cocircuit_digraph, corner_at_solution, polyhedron, solve_program, AffineOM, CocircuitDigraph, SolutionCorner,
};
use crate::sign::{ElementSet, Sign, SignSystem, SignVector};
use crate::tope_graph::{
    enumerate_convex_sets_capped, shatter_record, shatters, vc_dimension, ConvexSet, TopeGraph, DEFAULT_MAX_UNIVERSE,
};

/// Map from the convex sets of a tope graph to element sets.
///
/// The graph lives on a simple reduction of the input (loops dropped, one
/// element per parallel class); lookups and images use the input coordinates.
#[derive(Debug, Clone)]
pub struct ReconstructibleMap {
    ground_len: usize,
    kept: Vec<usize>,
    originals: HashMap<SignVector, SignVector>,
    graph: TopeGraph,
    sets: Vec<ConvexSet>,
    images: Vec<ElementSet>,
    index: HashMap<Vec<SignVector>, usize>,
    vc: usize,
    witnesses: BTreeMap<ElementSet, SignVector>,
    provenance: Vec<String>,
}

impl ReconstructibleMap {
    /// A map given by an explicit table over `sets` (convex sets of `graph`).
    pub fn from_table(graph: TopeGraph, sets: Vec<ConvexSet>, images: Vec<ElementSet>) -> Result<Self> {
        if sets.len() != images.len() {
            return Err(Error::InvalidArgument(format!(
                "{} convex sets but {} images",
                sets.len(),
                images.len()
            )));
        }
        let index = sets
            .iter()
            .enumerate()
            .map(|(i, c)| (c.members().to_vec(), i))
            .collect();
        let vc = vc_dimension(&graph).vc;
        let n = graph.ground_len();
        Ok(ReconstructibleMap {
            ground_len: n,
            kept: (0..n).collect(),
            originals: HashMap::new(),
            graph,
            sets,
            images,
            index,
            vc,
            witnesses: BTreeMap::new(),
            provenance: Vec::new(),
        })
    }

    fn reindexed(mut self, len: usize, kept: Vec<usize>, originals: &[SignVector]) -> Self {
        self.originals = originals.iter().map(|t| (t.restrict(&kept), *t)).collect();
        self.kept = kept;
        self.ground_len = len;
        self
    }

    fn is_identity(&self) -> bool {
        self.kept.len() == self.ground_len
    }

    /// Size of the input ground set.
    pub fn ground_len(&self) -> usize {
        self.ground_len
    }

    /// Input ids of the coordinates of the reduced graph.
    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    /// The (reduced) tope graph the map is defined on.
    pub fn graph(&self) -> &TopeGraph {
        &self.graph
    }

    pub fn vc(&self) -> usize {
        self.vc
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Table entries in reduced coordinates, canonical order of convex sets.
    pub fn entries(&self) -> impl Iterator<Item = (&ConvexSet, ElementSet)> + '_ {
        self.sets.iter().zip(self.images.iter().copied())
    }

    /// Replaces the image of the `i`-th convex set (reduced coordinates).
    pub fn set_image(&mut self, i: usize, image: ElementSet) {
        self.images[i] = image;
        self.witnesses.clear();
    }

    pub fn reduce_tope(&self, t: &SignVector) -> SignVector {
        if self.is_identity() {
            *t
        } else {
            t.restrict(&self.kept)
        }
    }

    pub fn lift_tope(&self, t: &SignVector) -> SignVector {
        if self.is_identity() {
            *t
        } else {
            self.originals
                .get(t)
                .copied()
                .unwrap_or_else(|| t.embed(&self.kept, self.ground_len))
        }
    }

    pub fn lift_elements(&self, set: ElementSet) -> ElementSet {
        if self.is_identity() {
            set
        } else {
            set.iter().map(|e| self.kept[e]).collect()
        }
    }

    /// Image of the convex set with the given members (input coordinates).
    pub fn image_of(&self, members: &[SignVector]) -> Option<ElementSet> {
        let mut key: Vec<SignVector> = members.iter().map(|t| self.reduce_tope(t)).collect();
        key.sort();
        key.dedup();
        self.index.get(&key).map(|&i| self.lift_elements(self.images[i]))
    }

    /// Distinct images in input coordinates.
    pub fn image_sets(&self) -> BTreeSet<ElementSet> {
        self.images.iter().map(|v| self.lift_elements(*v)).collect()
    }

    /// Canonical witness tope of the fiber of `image` (input coordinates).
    pub fn witness(&self, image: ElementSet) -> Option<SignVector> {
        self.witnesses
            .iter()
            .find(|(v, _)| self.lift_elements(**v) == image)
            .map(|(_, t)| self.lift_tope(t))
    }

    /// All witnesses keyed by image, input coordinates.
    pub fn witnesses(&self) -> BTreeMap<ElementSet, SignVector> {
        self.witnesses
            .iter()
            .map(|(v, t)| (self.lift_elements(*v), self.lift_tope(t)))
            .collect()
    }

    pub fn provenance(&self) -> &[String] {
        &self.provenance
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapViolation {
    Missing { set: Vec<SignVector> },
    NotOsculating { set: Vec<SignVector>, image: ElementSet },
    TooLarge { set: Vec<SignVector>, image: ElementSet },
    NotShattered { image: ElementSet },
    EmptyFiber { image: ElementSet },
}

impl fmt::Display for MapViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tokens = |set: &[SignVector]| set.iter().map(|t| t.to_token()).collect::<Vec<_>>().join(",");
        match self {
            MapViolation::Missing { set } => write!(f, "no image for convex set [{}]", tokens(set)),
            MapViolation::NotOsculating { set, image } => {
                write!(
                    f,
                    "image {} of [{}] is not inside osc",
                    image.display_one_based(),
                    tokens(set)
                )
            }
            MapViolation::TooLarge { set, image } => {
                write!(
                    f,
                    "image {} of [{}] exceeds the VC-dimension",
                    image.display_one_based(),
                    tokens(set)
                )
            }
            MapViolation::NotShattered { image } => write!(f, "image {} is not shattered", image.display_one_based()),
            MapViolation::EmptyFiber { image } => {
                write!(
                    f,
                    "convex sets mapped to {} have empty intersection",
                    image.display_one_based()
                )
            }
        }
    }
}

/// Outcome of checking a map against the reconstructibility conditions.
#[derive(Debug, Clone)]
pub struct MapReport {
    pub convex_sets: usize,
    pub images: usize,
    pub max_image: usize,
    pub vc: usize,
    pub violations: Vec<MapViolation>,
    /// Canonically smallest tope of each fiber intersection (reduced coordinates).
    pub witnesses: BTreeMap<ElementSet, SignVector>,
}

impl MapReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks totality, `a(C) ⊆ osc(C)`, `|a(C)| ≤ vc`, shattering of every image
/// and nonempty fiber intersections, exhaustively over the convex sets.
pub fn verify_reconstructible(map: &ReconstructibleMap) -> MapReport {
    let graph = &map.graph;
    let vc = vc_dimension(graph).vc;
    let mut violations = Vec::new();
    let all = enumerate_convex_sets_capped(graph, graph.ground_len()).unwrap_or_default();
    let mut fibers: BTreeMap<ElementSet, Vec<&ConvexSet>> = BTreeMap::new();
    let mut max_image = 0;
    for c in &all {
        let Some(&i) = map.index.get(c.members()) else {
            violations.push(MapViolation::Missing {
                set: c.members().to_vec(),
            });
            continue;
        };
        let image = map.images[i];
        max_image = max_image.max(image.len());
        if !image.is_subset(c.osc()) {
            violations.push(MapViolation::NotOsculating {
                set: c.members().to_vec(),
                image,
            });
        }
        if image.len() > vc {
            violations.push(MapViolation::TooLarge {
                set: c.members().to_vec(),
                image,
            });
        }
        fibers.entry(image).or_default().push(c);
    }
    let mut witnesses = BTreeMap::new();
    for (image, sets) in &fibers {
        if !shatters(graph.vertices(), *image) {
            violations.push(MapViolation::NotShattered { image: *image });
        }
        let common = sets[0]
            .members()
            .iter()
            .find(|t| sets[1..].iter().all(|c| c.contains(t)));
        match common {
            Some(t) => {
                witnesses.insert(*image, *t);
            }
            None => violations.push(MapViolation::EmptyFiber { image: *image }),
        }
    }
    MapReport {
        convex_sets: all.len(),
        images: fibers.len(),
        max_image,
        vc,
        violations,
        witnesses,
    }
}

/// Injective assignment of shattered `vc`-sets to the convex subsets of a corner.
#[derive(Debug, Clone)]
pub struct CornerMap {
    pub corner: CornerRecord,
    pub vc: usize,
    /// Convex subsets of the corner in canonical order, with their images.
    pub table: Vec<(ConvexSet, ElementSet)>,
}

impl CornerMap {
    pub fn image(&self, members: &[SignVector]) -> Option<ElementSet> {
        self.table.iter().find(|(c, _)| c.members() == members).map(|(_, v)| *v)
    }

    pub fn is_injective(&self) -> bool {
        let distinct: HashSet<ElementSet> = self.table.iter().map(|(_, v)| *v).collect();
        distinct.len() == self.table.len()
    }
}

pub fn build_corner_map(om: &OrientedStructure, corner: &CornerRecord) -> Result<CornerMap> {
    let graph = TopeGraph::new(om.topes())?;
    let sets = enumerate_convex_sets_capped(&graph, graph.ground_len())?;
    corner_map_on(om, corner, &graph, &sets)
}

fn corner_map_on(
    om: &OrientedStructure,
    corner: &CornerRecord,
    graph: &TopeGraph,
    sets: &[ConvexSet],
) -> Result<CornerMap> {
    let record = shatter_record(graph.vertices(), graph.ground_len());
    let vc = record.vc;
    let top: Vec<ElementSet> = record.shattered.iter().copied().filter(|v| v.len() == vc).collect();
    let d: HashSet<SignVector> = corner.topes.iter().copied().collect();
    let inside: Vec<&ConvexSet> = sets.iter().filter(|c| c.is_subset_of(&d)).collect();
    let mut candidates = Vec::with_capacity(inside.len());
    for c in &inside {
        ensure!(
            crate::tope_graph::is_full(om, c)?,
            "convex subset [{}] of a corner is not full",
            c.to_tokens().join(",")
        );
        candidates.push(top.iter().copied().filter(|v| v.is_subset(c.osc())).collect::<Vec<_>>());
    }
    let mut owner: HashMap<ElementSet, usize> = HashMap::new();
    let mut assigned: Vec<Option<ElementSet>> = vec![None; inside.len()];
    let mut injective = true;
    for i in 0..inside.len() {
        let mut visited = HashSet::new();
        if !augment(i, &candidates, &mut owner, &mut assigned, &mut visited) {
            injective = false;
            break;
        }
    }
    if !injective {
        // More convex subsets than shattered vc-sets can occur (rank 3 and up);
        // fall back to sharing images between sets with a common tope.
        let mut fibers: HashMap<ElementSet, Vec<SignVector>> = HashMap::new();
        assigned = vec![None; inside.len()];
        let mut budget = SHARED_SEARCH_BUDGET;
        if !assign_shared(0, &inside, &candidates, &mut fibers, &mut assigned, &mut budget) {
            let stuck = assigned.iter().position(Option::is_none).unwrap_or(0);
            return Err(Error::SearchExhausted(format!(
                "convex set [{}]",
                inside[stuck].to_tokens().join(",")
            )));
        }
    }
    let table = inside
        .iter()
        .zip(assigned)
        .map(|(c, v)| ((*c).clone(), v.expect("every set is assigned")))
        .collect();
    Ok(CornerMap {
        corner: corner.clone(),
        vc,
        table,
    })
}

/// Node budget for the shared-image search.
const SHARED_SEARCH_BUDGET: usize = 1_000_000;

/// Backtracking in canonical order: each set takes the smallest candidate whose
/// fiber keeps a common tope.
fn assign_shared(
    i: usize,
    inside: &[&ConvexSet],
    candidates: &[Vec<ElementSet>],
    fibers: &mut HashMap<ElementSet, Vec<SignVector>>,
    assigned: &mut [Option<ElementSet>],
    budget: &mut usize,
) -> bool {
    if i == inside.len() {
        return true;
    }
    for &v in &candidates[i] {
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        let previous = fibers.get(&v).cloned();
        let common: Vec<SignVector> = match &previous {
            None => inside[i].members().to_vec(),
            Some(ts) => ts.iter().copied().filter(|t| inside[i].contains(t)).collect(),
        };
        if common.is_empty() {
            continue;
        }
        fibers.insert(v, common);
        assigned[i] = Some(v);
        if assign_shared(i + 1, inside, candidates, fibers, assigned, budget) {
            return true;
        }
        assigned[i] = None;
        match previous {
            None => fibers.remove(&v),
            Some(ts) => fibers.insert(v, ts),
        };
    }
    false
}

/// Augmenting-path step of the matching: tries candidates in canonical order.
fn augment(
    i: usize,
    candidates: &[Vec<ElementSet>],
    owner: &mut HashMap<ElementSet, usize>,
    assigned: &mut [Option<ElementSet>],
    visited: &mut HashSet<ElementSet>,
) -> bool {
    for &v in &candidates[i] {
        if !visited.insert(v) {
            continue;
        }
        let free = match owner.get(&v) {
            None => true,
            Some(&j) => augment(j, candidates, owner, assigned, visited),
        };
        if free {
            owner.insert(v, i);
            assigned[i] = Some(v);
            return true;
        }
    }
    false
}

/// Solution corner at a cocircuit, its topes and the map built on it.
type SolvedCorner = (Rc<SolutionCorner>, Rc<Vec<SignVector>>, Rc<ReconstructibleMap>);

/// An OM program solved while building an affine map.
#[derive(Debug, Clone)]
pub struct ProgramRecord {
    pub affine: Rc<AffineOM>,
    pub digraph: Rc<CocircuitDigraph>,
    pub constraints: SignVector,
    pub solution: SignVector,
}

/// One convex set handled through a program solution and its cached corner map.
#[derive(Debug, Clone)]
pub struct CaseTwoRecord {
    pub program: usize,
    pub solution: SignVector,
    /// `P(S) ∩ T(X)` in the coordinates of `L̄(X)`.
    pub cell_topes: Vec<SignVector>,
    pub corner: Rc<Vec<SignVector>>,
    pub map: Rc<ReconstructibleMap>,
    pub image: ElementSet,
}

/// Check that a size-`vc` image is shattered by `T(X)` for exactly one affine cocircuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniquenessRecord {
    pub image: ElementSet,
    pub cocircuits: usize,
}

/// Deterministic, single-threaded build context with memoized sub-builds and
/// a record of every program, case-(ii) lookup and uniqueness check.
#[derive(Debug, Clone)]
pub struct BuildSession {
    max_universe: usize,
    affine_cache: HashMap<(Vec<SignVector>, usize), Rc<ReconstructibleMap>>,
    pub programs: Vec<ProgramRecord>,
    pub case_two: Vec<CaseTwoRecord>,
    pub uniqueness: Vec<UniquenessRecord>,
    trace: Vec<String>,
}

impl Default for BuildSession {
    fn default() -> Self {
        BuildSession::new(DEFAULT_MAX_UNIVERSE)
    }
}

impl BuildSession {
    pub fn new(max_universe: usize) -> Self {
        BuildSession {
            max_universe,
            affine_cache: HashMap::new(),
            programs: Vec::new(),
            case_two: Vec::new(),
            uniqueness: Vec::new(),
            trace: Vec::new(),
        }
    }

    /// Build trace as `key=value` lines, one event per line.
    pub fn trace_text(&self) -> String {
        let mut out = String::new();
        for line in &self.trace {
            out.push_str(line);
            out.push('\n');
        }
        out
    }

    fn check_universe(&self, n: usize) -> Result<()> {
        if n > self.max_universe {
            return Err(Error::UniverseTooLarge {
                size: n,
                cap: self.max_universe,
            });
        }
        Ok(())
    }

    /// Sub-builds add up to two elements to the input.
    fn convex_sets(&self, graph: &TopeGraph) -> Result<Vec<ConvexSet>> {
        enumerate_convex_sets_capped(graph, self.max_universe + 2)
    }

    pub fn om_map(&mut self, om: &OrientedStructure) -> Result<ReconstructibleMap> {
        if !om.is_om() {
            return Err(Error::NotAnOm(om.classification().verdict.to_string()));
        }
        self.check_universe(om.ground_len())?;
        let n = om.ground_len();
        let kept = simple_elements(om.vectors(), n, None);
        let map = if kept.len() == n {
            self.simple_om_map(om)?
        } else {
            let reduced = OrientedStructure::om(restrict_system(om.system(), &kept)?)?;
            self.simple_om_map(&reduced)?.reindexed(n, kept, om.topes())
        };
        finish(map)
    }

    fn simple_om_map(&mut self, om: &OrientedStructure) -> Result<ReconstructibleMap> {
        if om.topes().len() == 1 {
            return trivial_map(om.topes()[0]);
        }
        let corner = find_corner(om)?;
        self.trace.push(format!(
            "event=corner ground={} corner={} side={}",
            om.ground_len(),
            corner.len(),
            corner.side.to_char()
        ));
        let mut map = self.extend_map(om, &corner)?;
        map.provenance.push(format!("kind=om corner={}", tokens(&corner.topes)));
        Ok(map)
    }

    /// Extends the map of the affine remainder `G \ D` by the corner map on `D`.
    pub fn extend_map(&mut self, om: &OrientedStructure, corner: &CornerRecord) -> Result<ReconstructibleMap> {
        if !om.classification().is_simple {
            return Err(Error::NotSimple);
        }
        let graph = TopeGraph::new(om.topes())?;
        let sets = self.convex_sets(&graph)?;
        let vc = vc_dimension(&graph).vc;
        let f = corner.new_element;
        let ext = if corner.side == Sign::Plus {
            corner.extension.clone()
        } else {
            OrientedStructure::om(reorient_system(corner.extension.system(), f)?)?
        };
        let inner = self.affine_map(&AffineOM::new(ext, f)?)?;
        let cmap = corner_map_on(om, corner, &graph, &sets)?;
        let d: HashSet<SignVector> = corner.topes.iter().copied().collect();
        let mut images = Vec::with_capacity(sets.len());
        for c in &sets {
            let rest: Vec<SignVector> = c
                .members()
                .iter()
                .filter(|t| !d.contains(t))
                .map(|t| t.push(Sign::Plus))
                .collect();
            let image = if rest.is_empty() {
                let v = cmap.image(c.members()).ok_or_else(|| {
                    Error::InvariantViolated(format!("corner map misses [{}]", c.to_tokens().join(",")))
                })?;
                ensure!(v.len() == vc, "corner image {} has size {} != {vc}", v, v.len());
                v
            } else {
                let v = inner
                    .image_of(&rest)
                    .ok_or_else(|| Error::InvariantViolated(format!("remainder map misses [{}]", tokens(&rest))))?;
                if v.len() >= vc {
                    return Err(Error::ImageCollision(format!(
                        "remainder image {} reaches size {vc}",
                        v.display_one_based()
                    )));
                }
                v
            };
            images.push(image);
        }
        let mut map = ReconstructibleMap::from_table(graph, sets, images)?;
        map.provenance
            .push(format!("kind=extend corner={} vc={vc}", corner.len()));
        check(&map)?;
        Ok(map)
    }

    pub fn affine_map(&mut self, affine: &AffineOM) -> Result<Rc<ReconstructibleMap>> {
        self.check_universe(affine.ground_len().saturating_sub(2))?;
        let key = (affine.base().vectors().to_vec(), affine.g());
        if let Some(map) = self.affine_cache.get(&key) {
            return Ok(map.clone());
        }
        let n = affine.ground_len();
        let kept = simple_elements(affine.base().vectors(), n, Some(affine.g()));
        let map = if kept.len() == n {
            self.simple_affine_map(affine)?
        } else {
            let reduced = OrientedStructure::om(restrict_system(affine.base().system(), &kept)?)?;
            let g = kept.iter().position(|&e| e == affine.g()).expect("g is kept");
            let map = self.simple_affine_map(&AffineOM::new(reduced, g)?)?;
            map.reindexed(n, kept, &affine.topes())
        };
        let map = Rc::new(map);
        self.affine_cache.insert(key, map.clone());
        Ok(map)
    }

    fn simple_affine_map(&mut self, affine: &AffineOM) -> Result<ReconstructibleMap> {
        let topes = affine.topes();
        let graph = TopeGraph::new(&topes)?;
        let vc = vc_dimension(&graph).vc;
        let map = match vc {
            0 => trivial_map(topes[0])?,
            1 => tree_map(graph, self.convex_sets_of(&topes)?)?,
            _ => self.affine_step(affine, graph, vc)?,
        };
        check(&map)?;
        Ok(map)
    }

    fn convex_sets_of(&self, topes: &[SignVector]) -> Result<Vec<ConvexSet>> {
        self.convex_sets(&TopeGraph::new(topes)?)
    }

    fn affine_step(&mut self, affine: &AffineOM, graph: TopeGraph, vc: usize) -> Result<ReconstructibleMap> {
        let n = affine.ground_len();
        let g = affine.g();
        let f = n;
        let (ext, sequence) = perturbation(affine)?;
        self.trace.push(format!(
            "event=perturb ground={n} g={} sequence={}",
            g + 1,
            sequence
                .iter()
                .map(|(e, s)| format!("{}{}", e + 1, s.to_char()))
                .collect::<Vec<_>>()
                .join(",")
        ));

        let mut h1: Vec<SignVector> = ext
            .topes()
            .iter()
            .filter(|t| t.get(f) == Sign::Minus && t.get(g) == Sign::Plus)
            .map(|t| t.delete(ElementSet::singleton(f)))
            .collect();
        h1.sort();
        let contracted = OrientedStructure::om(contract(ext.system(), f)?)?;
        let lower = AffineOM::new(contracted, g)?;
        ensure!(lower.topes() == h1, "contraction topes differ from the cut topes");
        let inner = self.affine_map(&lower)?;
        let h1_set: HashSet<SignVector> = h1.iter().copied().collect();

        let a_prime = Rc::new(AffineOM::new(ext.clone(), g)?);
        let digraph = Rc::new(cocircuit_digraph(&a_prime, f)?);
        let mut solved: HashMap<SignVector, SolvedCorner> = HashMap::new();

        let sets = self.convex_sets(&graph)?;
        let mut images = Vec::with_capacity(sets.len());
        for c in &sets {
            let meet: Vec<SignVector> = c.members().iter().filter(|t| h1_set.contains(t)).copied().collect();
            if !meet.is_empty() {
                let v = inner
                    .image_of(&meet)
                    .ok_or_else(|| Error::InvariantViolated(format!("lower map misses [{}]", tokens(&meet))))?;
                if v.len() >= vc {
                    return Err(Error::ImageCollision(format!(
                        "lower image {} reaches size {vc}",
                        v.display_one_based()
                    )));
                }
                images.push(v);
                continue;
            }
            let s = c.sides().push(Sign::Zero);
            let p = polyhedron(&a_prime, &s)?;
            let p_topes = p.topes();
            let mut projected: Vec<SignVector> = p_topes.iter().map(|t| t.delete(ElementSet::singleton(f))).collect();
            projected.sort();
            ensure!(
                p_topes.iter().all(|t| t.get(f) == Sign::Plus) && projected == c.members(),
                "polyhedron {s} does not lift [{}] bijectively",
                c.to_tokens().join(",")
            );
            let solution = solve_program(&digraph, &p)?;
            let x = solution.solution;
            ensure!(
                x.get(f) == Sign::Plus,
                "program solution {x} does not lie on the + side of f"
            );
            self.programs.push(ProgramRecord {
                affine: a_prime.clone(),
                digraph: digraph.clone(),
                constraints: s,
                solution: x,
            });
            self.trace
                .push(format!("event=program constraints={} solution={x}", s.to_token()));
            if let Entry::Vacant(slot) = solved.entry(x) {
                let sc = corner_at_solution(&a_prime, &digraph, &x)?;
                self.trace.push(format!(
                    "event=solution-corner node={x} corner={}",
                    tokens(&sc.corner.topes)
                ));
                let b = self.extend_map(&sc.om, &sc.corner)?;
                let corner = Rc::new(sc.corner.topes.clone());
                slot.insert((Rc::new(sc), corner, Rc::new(b)));
            }
            let (sc, corner, b) = solved[&x].clone();
            let mut cell: Vec<SignVector> = p_topes
                .iter()
                .filter(|t| x.below(t))
                .map(|t| sc.upset.project(t))
                .collect();
            cell.sort();
            ensure!(
                cell.iter().all(|t| corner.binary_search(t).is_ok()),
                "P(S) ∩ T({x}) is not inside the solution corner"
            );
            let local = b
                .image_of(&cell)
                .ok_or_else(|| Error::InvariantViolated(format!("solution map misses [{}]", tokens(&cell))))?;
            let v = sc.upset.lift_elements(local);
            ensure!(v.len() == vc && !v.contains(f), "case (ii) image {v} is malformed");
            self.case_two.push(CaseTwoRecord {
                program: self.programs.len() - 1,
                solution: x,
                cell_topes: cell,
                corner,
                map: b,
                image: v,
            });
            images.push(v);
        }

        let top: BTreeSet<ElementSet> = images.iter().copied().filter(|v| v.len() == vc).collect();
        let lifted: Vec<Vec<SignVector>> = digraph
            .nodes()
            .iter()
            .map(|x| ext.topes().iter().filter(|t| x.below(t)).copied().collect())
            .collect();
        for v in top {
            let count = lifted.iter().filter(|ts| shatters(ts, v)).count();
            self.uniqueness.push(UniquenessRecord {
                image: v,
                cocircuits: count,
            });
            ensure!(count == 1, "image {v} is shattered by {count} cocircuit cells");
        }

        let mut map = ReconstructibleMap::from_table(graph, sets, images)?;
        map.provenance.push(format!(
            "kind=affine vc={vc} lower={} solutions={}",
            inner.len(),
            solved.len()
        ));
        Ok(map)
    }

    /// Map of a COM built innermost-out along a corner peeling.
    pub fn com_map(&mut self, system: &SignSystem) -> Result<ReconstructibleMap> {
        self.check_universe(system.ground_len())?;
        let steps = com_corner_peeling(system)?;
        let last = steps.last().expect("a peeling has at least one step");
        let mut stage: Vec<SignVector> = last.removed.clone();
        let mut map = trivial_map(stage[0])?;
        for step in steps.iter().rev().skip(1) {
            let corner = step
                .corner
                .as_ref()
                .ok_or_else(|| Error::InvariantViolated("inner peeling step without corner".into()))?;
            let previous = stage.clone();
            let prev_set: HashSet<SignVector> = previous.iter().copied().collect();
            stage.extend(step.removed.iter().copied());
            stage.sort();
            let graph = TopeGraph::new(&stage)?;
            let sets = self.convex_sets(&graph)?;
            let cell_om = OrientedStructure::om(step.cell.system.clone())?;
            let cell_graph = TopeGraph::new(cell_om.topes())?;
            let cell_sets = self.convex_sets(&cell_graph)?;
            let cmap = corner_map_on(&cell_om, corner, &cell_graph, &cell_sets)?;
            self.trace.push(format!(
                "event=peel cell={} corner={} vc={}",
                step.cell_base,
                tokens(&step.removed),
                cmap.vc
            ));
            let mut images = Vec::with_capacity(sets.len());
            for c in &sets {
                let rest: Vec<SignVector> = c.members().iter().filter(|t| prev_set.contains(t)).copied().collect();
                let v = if rest.is_empty() {
                    let mut local: Vec<SignVector> = c.members().iter().map(|t| step.cell.project(t)).collect();
                    local.sort();
                    let v = cmap.image(&local).ok_or_else(|| {
                        Error::InvariantViolated(format!("cell corner map misses [{}]", tokens(&local)))
                    })?;
                    let v = step.cell.lift_elements(v);
                    if shatters(&previous, v) {
                        return Err(Error::ImageCollision(format!(
                            "corner image {} is shattered by the remainder",
                            v.display_one_based()
                        )));
                    }
                    v
                } else {
                    map.image_of(&rest)
                        .ok_or_else(|| Error::InvariantViolated(format!("remainder map misses [{}]", tokens(&rest))))?
                };
                images.push(v);
            }
            map = ReconstructibleMap::from_table(graph, sets, images)?;
            check(&map)?;
        }
        map.provenance.push(format!("kind=com steps={}", steps.len()));
        finish(map)
    }
}

pub fn build_om_map(om: &OrientedStructure) -> Result<ReconstructibleMap> {
    BuildSession::default().om_map(om)
}

pub fn build_affine_map(affine: &AffineOM) -> Result<ReconstructibleMap> {
    let map = BuildSession::default().affine_map(affine)?;
    finish((*map).clone())
}

pub fn build_com_map(system: &SignSystem) -> Result<ReconstructibleMap> {
    BuildSession::default().com_map(system)
}

pub fn extend_map(om: &OrientedStructure, corner: &CornerRecord) -> Result<ReconstructibleMap> {
    let map = BuildSession::default().extend_map(om, corner)?;
    finish(map)
}

fn check(map: &ReconstructibleMap) -> Result<()> {
    let report = verify_reconstructible(map);
    match report.violations.first() {
        None => Ok(()),
        Some(v) => Err(Error::InvariantViolated(format!("built map fails verification: {v}"))),
    }
}

/// Verifies the map and stores the fiber witnesses.
fn finish(mut map: ReconstructibleMap) -> Result<ReconstructibleMap> {
    let report = verify_reconstructible(&map);
    if let Some(v) = report.violations.first() {
        return Err(Error::InvariantViolated(format!("built map fails verification: {v}")));
    }
    map.witnesses = report.witnesses;
    Ok(map)
}

fn trivial_map(tope: SignVector) -> Result<ReconstructibleMap> {
    let graph = TopeGraph::new(&[tope])?;
    let set = graph.convex_set(&[tope]);
    let mut map = ReconstructibleMap::from_table(graph, vec![set], vec![ElementSet::EMPTY])?;
    map.provenance.push("kind=single".into());
    Ok(map)
}

/// VC-dimension one: `∅` on sets containing the base tope, otherwise the
/// osculating element separating the set from the base.
fn tree_map(graph: TopeGraph, sets: Vec<ConvexSet>) -> Result<ReconstructibleMap> {
    let base = graph.vertices()[0];
    let mut images = Vec::with_capacity(sets.len());
    for c in &sets {
        if c.contains(&base) {
            images.push(ElementSet::EMPTY);
            continue;
        }
        let v: ElementSet = c.osc().iter().filter(|&e| c.sides().get(e) != base.get(e)).collect();
        ensure!(v.len() == 1, "{} elements separate a subtree from the base", v.len());
        images.push(v);
    }
    let mut map = ReconstructibleMap::from_table(graph, sets, images)?;
    map.provenance.push(format!("kind=tree base={base}"));
    Ok(map)
}

/// Elements kept by simplification: no loops, one per parallel class,
/// `prefer` winning its class.
fn simple_elements(vectors: &[SignVector], n: usize, prefer: Option<usize>) -> Vec<usize> {
    let order: Vec<usize> = prefer
        .into_iter()
        .chain((0..n).filter(|&e| Some(e) != prefer))
        .collect();
    let mut kept: Vec<usize> = Vec::new();
    for e in order {
        if vectors.iter().all(|v| v.get(e).is_zero()) {
            continue;
        }
        let parallel = kept
            .iter()
            .any(|&k| vectors.iter().all(|v| v.get(e) == v.get(k)) || vectors.iter().all(|v| v.get(e) == -v.get(k)));
        if !parallel {
            kept.push(e);
        }
    }
    kept.sort_unstable();
    kept
}

fn restrict_system(system: &SignSystem, kept: &[usize]) -> Result<SignSystem> {
    SignSystem::new(
        system.ground().restrict(kept),
        system.vectors().iter().map(|v| v.restrict(kept)),
    )
}

fn reorient_system(system: &SignSystem, e: usize) -> Result<SignSystem> {
    SignSystem::new(system.ground().clone(), system.vectors().iter().map(|v| v.reorient(e)))
}

/// Extension by `f` in general position whose `+` side covers the affine topes.
/// Tries `[g+, rest+]` first, then `[g+, e±, rest+]`.
fn perturbation(affine: &AffineOM) -> Result<(OrientedStructure, Vec<(usize, Sign)>)> {
    let om = affine.base();
    let n = om.ground_len();
    let g = affine.g();
    let rest: Vec<usize> = (0..n).filter(|&e| e != g).collect();
    let mut sequences = vec![std::iter::once((g, Sign::Plus))
        .chain(rest.iter().map(|&e| (e, Sign::Plus)))
        .collect::<Vec<_>>()];
    for &e in &rest {
        for s in [Sign::Plus, Sign::Minus] {
            let mut seq = vec![(g, Sign::Plus), (e, s)];
            seq.extend(rest.iter().filter(|&&o| o != e).map(|&o| (o, Sign::Plus)));
            sequences.push(seq);
        }
    }
    let topes = affine.topes();
    for seq in sequences {
        let sigma = Localization::lex(om, &seq)?;
        let ext = match extend_by_localization(om, &sigma) {
            Ok(ext) => ext,
            Err(Error::InvalidLocalization(_)) => continue,
            Err(e) => return Err(e),
        };
        if !is_general_position(&ext, n)? {
            continue;
        }
        let covered: HashSet<SignVector> = ext
            .topes()
            .iter()
            .filter(|t| t.get(n) == Sign::Plus)
            .map(|t| t.delete(ElementSet::singleton(n)))
            .collect();
        if topes.iter().all(|t| covered.contains(t)) {
            return Ok((ext, seq));
        }
    }
    Err(Error::NotGeneralPosition(n))
}

fn tokens(ts: &[SignVector]) -> String {
    ts.iter().map(|t| t.to_token()).collect::<Vec<_>>().join(",")
}
