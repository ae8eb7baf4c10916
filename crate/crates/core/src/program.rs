//! Affine OMs, directed cocircuit graphs, polyhedra and OM programs.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use crate::axioms::{upset_unchecked, CoverPoset, OrientedStructure, Upset};
use crate::error::{Error, Result};
use crate::extensions::{
    corner_from_extension, extend_by_localization, is_general_position, CornerRecord, Localization,
};
use crate::sign::{Sign, SignSystem, SignVector};

/// The positive halfspace of an OM at a distinguished element `g`.
#[derive(Debug, Clone)]
pub struct AffineOM {
    base: OrientedStructure,
    g: usize,
}

impl AffineOM {
    pub fn new(base: OrientedStructure, g: usize) -> Result<Self> {
        if g >= base.ground_len() {
            return Err(Error::ElementNotFound(g));
        }
        if !base.is_om() {
            return Err(Error::NotAnOm(base.classification().verdict.to_string()));
        }
        if !base.vectors().iter().any(|x| x.get(g) == Sign::Plus) {
            return Err(Error::InvalidArgument(format!("element {g} is a loop")));
        }
        Ok(AffineOM { base, g })
    }

    pub fn base(&self) -> &OrientedStructure {
        &self.base
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn ground_len(&self) -> usize {
        self.base.ground_len()
    }

    /// `{X ∈ L | X_g = +}`.
    pub fn covectors(&self) -> Vec<SignVector> {
        self.base
            .vectors()
            .iter()
            .filter(|x| x.get(self.g) == Sign::Plus)
            .copied()
            .collect()
    }

    /// The plane at infinity `{X ∈ L | X_g = 0}`.
    pub fn infinity(&self) -> Vec<SignVector> {
        self.base
            .vectors()
            .iter()
            .filter(|x| x.get(self.g).is_zero())
            .copied()
            .collect()
    }

    pub fn topes(&self) -> Vec<SignVector> {
        self.base
            .topes()
            .iter()
            .filter(|x| x.get(self.g) == Sign::Plus)
            .copied()
            .collect()
    }

    /// Cocircuits of the base lying in the positive halfspace of `g`.
    pub fn cocircuits(&self) -> Vec<SignVector> {
        self.base
            .cocircuits()
            .iter()
            .filter(|x| x.get(self.g) == Sign::Plus)
            .copied()
            .collect()
    }

    pub fn rank(&self) -> Result<usize> {
        Ok(self.base.om_rank()? - 1)
    }

    /// The affine covectors as a sign system (a COM).
    pub fn system(&self) -> SignSystem {
        SignSystem::new(self.base.system().ground().clone(), self.covectors()).expect("subsystem shares the ground set")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HalfArcDirection {
    Inward,
    Outward,
    Unoriented,
}

/// Edge between two adjacent affine cocircuits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    /// Node indices; for oriented arcs the arc points from `tail` to `head`.
    pub tail: usize,
    pub head: usize,
    pub oriented: bool,
    pub cover: SignVector,
    pub orienting: SignVector,
}

/// Edge from an affine cocircuit towards a cocircuit at infinity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfArc {
    pub node: usize,
    pub infinity: SignVector,
    pub cover: SignVector,
    pub direction: HalfArcDirection,
}

/// Directed cocircuit graph of an affine OM with respect to an element `f`.
#[derive(Debug, Clone)]
pub struct CocircuitDigraph {
    f: usize,
    g: usize,
    nodes: Vec<SignVector>,
    node_index: HashMap<SignVector, usize>,
    arcs: Vec<Arc>,
    half_arcs: Vec<HalfArc>,
}

pub fn cocircuit_digraph(affine: &AffineOM, f: usize) -> Result<CocircuitDigraph> {
    let n = affine.ground_len();
    let g = affine.g();
    if f >= n {
        return Err(Error::ElementNotFound(f));
    }
    if f == g {
        return Err(Error::InvalidArgument(
            "objective element equals the affine element".into(),
        ));
    }
    let base = affine.base();
    let cocircuits: HashSet<SignVector> = base.cocircuits().iter().copied().collect();
    let at_infinity: Vec<SignVector> = base
        .cocircuits()
        .iter()
        .filter(|z| z.get(g).is_zero())
        .copied()
        .collect();
    let nodes = affine.cocircuits();
    let node_index: HashMap<SignVector, usize> = nodes.iter().enumerate().map(|(i, x)| (*x, i)).collect();
    let poset = CoverPoset::new(base.vectors());

    let mut arcs = Vec::new();
    let mut half_arcs = Vec::new();
    for (yi, y) in poset.vectors().iter().enumerate() {
        if y.get(g) != Sign::Plus {
            continue;
        }
        let lower: Vec<SignVector> = poset
            .lower_covers(yi)
            .iter()
            .map(|&j| poset.vectors()[j])
            .filter(|x| cocircuits.contains(x))
            .collect();
        for (a, x1) in lower.iter().enumerate() {
            for x2 in &lower[a + 1..] {
                match (node_index.get(x1), node_index.get(x2)) {
                    (Some(&i1), Some(&i2)) => {
                        let z = orienting_cocircuit(x1, x2, &at_infinity)?;
                        let (tail, head, oriented) = match z.get(f) {
                            Sign::Plus => (i1, i2, true),
                            Sign::Minus => (i2, i1, true),
                            Sign::Zero => (i1.min(i2), i1.max(i2), false),
                        };
                        arcs.push(Arc {
                            tail,
                            head,
                            oriented,
                            cover: *y,
                            orienting: z,
                        });
                    }
                    (Some(&i), None) | (None, Some(&i)) => {
                        let inf = if node_index.contains_key(x1) { *x2 } else { *x1 };
                        let direction = match inf.get(f) {
                            Sign::Plus => HalfArcDirection::Outward,
                            Sign::Minus => HalfArcDirection::Inward,
                            Sign::Zero => HalfArcDirection::Unoriented,
                        };
                        half_arcs.push(HalfArc {
                            node: i,
                            infinity: inf,
                            cover: *y,
                            direction,
                        });
                    }
                    (None, None) => {}
                }
            }
        }
    }
    Ok(CocircuitDigraph {
        f,
        g,
        nodes,
        node_index,
        arcs,
        half_arcs,
    })
}

/// The unique cocircuit at infinity agreeing with `-X1∘X2` off `Sep(-X1, X2)`.
fn orienting_cocircuit(x1: &SignVector, x2: &SignVector, at_infinity: &[SignVector]) -> Result<SignVector> {
    let nx1 = -*x1;
    let sep = nx1.sep(x2);
    let target = nx1.circ(x2);
    let keep: Vec<usize> = sep.iter().collect();
    let candidates: Vec<SignVector> = at_infinity
        .iter()
        .filter(|z| {
            let mut zz = **z;
            let mut tt = target;
            for &e in &keep {
                zz.set(e, Sign::Zero);
                tt.set(e, Sign::Zero);
            }
            zz == tt
        })
        .copied()
        .collect();
    if candidates.len() != 1 {
        return Err(Error::OrientationAmbiguous {
            x1: x1.to_string(),
            x2: x2.to_string(),
            candidates: candidates.len(),
        });
    }
    Ok(candidates[0])
}

impl CocircuitDigraph {
    pub fn f(&self) -> usize {
        self.f
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn nodes(&self) -> &[SignVector] {
        &self.nodes
    }

    pub fn node_index(&self, x: &SignVector) -> Option<usize> {
        self.node_index.get(x).copied()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn half_arcs(&self) -> &[HalfArc] {
        &self.half_arcs
    }

    /// In-degrees within the subgraph induced by the nodes of `p`.
    pub fn in_degrees(&self, p: &Polyhedron) -> Vec<Option<usize>> {
        let inside: Vec<bool> = self.nodes.iter().map(|x| p.contains(x)).collect();
        let mut deg: Vec<Option<usize>> = inside.iter().map(|&b| if b { Some(0) } else { None }).collect();
        for a in &self.arcs {
            if a.oriented && inside[a.tail] && inside[a.head] {
                *deg[a.head].as_mut().unwrap() += 1;
            }
        }
        deg
    }
}

/// `P(S) = {X ∈ L(A) | X_e ∈ {S_e, 0} for all e with S_e ≠ 0}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polyhedron {
    constraints: SignVector,
    members: Vec<SignVector>,
}

impl Polyhedron {
    pub fn constraints(&self) -> SignVector {
        self.constraints
    }

    pub fn members(&self) -> &[SignVector] {
        &self.members
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: &SignVector) -> bool {
        self.members.binary_search(x).is_ok()
    }

    pub fn topes(&self) -> Vec<SignVector> {
        self.members.iter().filter(|x| x.is_tope()).copied().collect()
    }
}

pub fn polyhedron(affine: &AffineOM, constraints: &SignVector) -> Result<Polyhedron> {
    if constraints.len() != affine.ground_len() {
        return Err(Error::GroundMismatch {
            left: affine.ground_len(),
            right: constraints.len(),
        });
    }
    if !constraints.get(affine.g()).is_zero() {
        return Err(Error::InvalidArgument(
            "constraints may not involve the affine element".into(),
        ));
    }
    let mut members: Vec<SignVector> = affine
        .covectors()
        .into_iter()
        .filter(|x| x.sep(constraints).is_empty())
        .collect();
    members.sort();
    Ok(Polyhedron {
        constraints: *constraints,
        members,
    })
}

/// Optimal cocircuit of a program with its verification data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgramSolution {
    pub solution: SignVector,
    /// Nodes of the program graph with in-degree zero, in canonical order.
    pub sources: Vec<SignVector>,
}

/// Canonically smallest node of `P` with no in-arcs in the program graph.
pub fn solve_program(digraph: &CocircuitDigraph, p: &Polyhedron) -> Result<ProgramSolution> {
    if p.is_empty() {
        return Err(Error::EmptyPolyhedron);
    }
    for h in &digraph.half_arcs {
        if h.direction == HalfArcDirection::Inward && p.contains(&digraph.nodes[h.node]) && p.contains(&h.cover) {
            return Err(Error::Unbounded {
                node: digraph.nodes[h.node].to_string(),
                infinity: h.infinity.to_string(),
            });
        }
    }
    let deg = digraph.in_degrees(p);
    let sources: Vec<SignVector> = digraph
        .nodes
        .iter()
        .zip(&deg)
        .filter(|(_, d)| **d == Some(0))
        .map(|(x, _)| *x)
        .collect();
    let solution = *sources.first().ok_or(Error::NoOptimum)?;
    Ok(ProgramSolution { solution, sources })
}

/// Corner of the OM `L̄(X)` read off the orientation of the edges at `X`.
#[derive(Debug, Clone)]
pub struct SolutionCorner {
    pub node: SignVector,
    pub upset: Upset,
    pub om: OrientedStructure,
    pub corner: CornerRecord,
}

/// Builds the extension of `L̄(X)` in which covers of `X` on arcs pointing into
/// `X` get `-` and all others `+`, and returns its `-` side corner.
pub fn corner_at_solution(affine: &AffineOM, digraph: &CocircuitDigraph, x: &SignVector) -> Result<SolutionCorner> {
    let node = digraph
        .node_index(x)
        .ok_or_else(|| Error::VectorNotInSystem(x.to_string()))?;
    let f = digraph.f();
    if x.get(f).is_zero() {
        return Err(Error::InvalidArgument(format!("{x} lies on the objective element")));
    }
    let mut at_x: BTreeMap<SignVector, Sign> = BTreeMap::new();
    for a in digraph.arcs() {
        if a.tail != node && a.head != node {
            continue;
        }
        let s = if !a.oriented {
            return Err(Error::NotGeneralPosition(f));
        } else if a.head == node {
            Sign::Minus
        } else {
            Sign::Plus
        };
        at_x.insert(a.cover, s);
    }
    for h in digraph.half_arcs() {
        if h.node != node {
            continue;
        }
        let s = match h.direction {
            HalfArcDirection::Inward => Sign::Minus,
            HalfArcDirection::Outward => Sign::Plus,
            HalfArcDirection::Unoriented => return Err(Error::NotGeneralPosition(f)),
        };
        at_x.insert(h.cover, s);
    }
    let upset = upset_unchecked(affine.base().system(), x);
    let om = OrientedStructure::om(upset.system.clone())?;
    let mut assignment = BTreeMap::new();
    for y in om.cocircuits() {
        let cover = upset.lift(y);
        let s = at_x
            .get(&cover)
            .copied()
            .ok_or_else(|| Error::InvariantViolated(format!("cover {cover} of {x} carries no edge")))?;
        assignment.insert(*y, s);
    }
    let ext = extend_by_localization(&om, &Localization::explicit(assignment))?;
    let e = om.ground_len();
    if !is_general_position(&ext, e)? {
        return Err(Error::NotGeneralPosition(f));
    }
    let corner = corner_from_extension(&om, &ext, e, Sign::Minus)?;
    Ok(SolutionCorner {
        node: *x,
        upset,
        om,
        corner,
    })
}

impl fmt::Display for HalfArcDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HalfArcDirection::Inward => "in",
            HalfArcDirection::Outward => "out",
            HalfArcDirection::Unoriented => "none",
        })
    }
}
