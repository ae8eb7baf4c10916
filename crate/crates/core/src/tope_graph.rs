//! Tope graphs as partial cubes: convex sets, osculating and crossing
//! elements, shattering and VC-dimension.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::axioms::{rank, OrientedStructure};
use crate::error::{Error, Result};
use crate::sign::{ElementSet, Sign, SignVector};

/// Default cap on the ground-set size for exponential enumerations.
pub const DEFAULT_MAX_UNIVERSE: usize = 12;

/// Induced subgraph of the hypercube on a set of full-support sign vectors.
#[derive(Debug, Clone)]
pub struct TopeGraph {
    ground_len: usize,
    vertices: Vec<SignVector>,
    index: HashMap<SignVector, usize>,
    /// `(neighbour, flipped element)` pairs per vertex.
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl TopeGraph {
    /// Builds the graph and checks that graph distance equals Hamming distance.
    pub fn new(topes: &[SignVector]) -> Result<Self> {
        let g = TopeGraph::unchecked(topes)?;
        g.check_partial_cube()?;
        Ok(g)
    }

    /// Builds the graph without the isometry check.
    pub fn unchecked(topes: &[SignVector]) -> Result<Self> {
        let first = topes.first().ok_or(Error::EmptySystem)?;
        let n = first.len();
        let mut vertices = Vec::with_capacity(topes.len());
        for t in topes {
            if t.len() != n {
                return Err(Error::GroundMismatch {
                    left: n,
                    right: t.len(),
                });
            }
            if !t.is_tope() {
                return Err(Error::InvalidArgument(format!("{t} does not have full support")));
            }
            vertices.push(*t);
        }
        vertices.sort();
        vertices.dedup();
        let index: HashMap<SignVector, usize> = vertices.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let mut adjacency = vec![Vec::new(); vertices.len()];
        for (i, v) in vertices.iter().enumerate() {
            for e in 0..n {
                if let Some(&j) = index.get(&v.reorient(e)) {
                    adjacency[i].push((j, e));
                }
            }
        }
        Ok(TopeGraph {
            ground_len: n,
            vertices,
            index,
            adjacency,
        })
    }

    fn check_partial_cube(&self) -> Result<()> {
        for (i, u) in self.vertices.iter().enumerate() {
            let dist = self.distances_from(i);
            for (j, v) in self.vertices.iter().enumerate().skip(i + 1) {
                let hamming = u.sep(v).len();
                if dist[j] != Some(hamming) {
                    return Err(Error::NotPartialCube {
                        u: u.to_string(),
                        v: v.to_string(),
                        hamming,
                        graph: dist[j],
                    });
                }
            }
        }
        Ok(())
    }

    pub fn distances_from(&self, start: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertices.len()];
        dist[start] = Some(0);
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let d = dist[i].unwrap();
            for &(j, _) in &self.adjacency[i] {
                if dist[j].is_none() {
                    dist[j] = Some(d + 1);
                    queue.push_back(j);
                }
            }
        }
        dist
    }

    pub fn ground_len(&self) -> usize {
        self.ground_len
    }

    pub fn vertices(&self) -> &[SignVector] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn index_of(&self, v: &SignVector) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn contains(&self, v: &SignVector) -> bool {
        self.index.contains_key(v)
    }

    pub fn neighbours(&self, i: usize) -> &[(usize, usize)] {
        &self.adjacency[i]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, adj)| adj.iter().filter(move |(j, _)| i < *j).map(move |&(j, e)| (i, j, e)))
    }

    /// Convex set spanned by the given members: osc/cross computed from edges.
    pub fn convex_set(&self, members: &[SignVector]) -> ConvexSet {
        let mut members = members.to_vec();
        members.sort();
        members.dedup();
        let inside: HashSet<SignVector> = members.iter().copied().collect();
        let mut osc = ElementSet::EMPTY;
        let mut cross = ElementSet::EMPTY;
        for m in &members {
            if let Some(i) = self.index_of(m) {
                for &(j, e) in &self.adjacency[i] {
                    if inside.contains(&self.vertices[j]) {
                        cross.insert(e);
                    } else {
                        osc.insert(e);
                    }
                }
            }
        }
        let mut sides = SignVector::zero(self.ground_len);
        for e in osc.iter() {
            sides.set(e, members[0].get(e));
        }
        ConvexSet {
            members,
            osc,
            cross,
            sides,
        }
    }

    /// Whether `members` is an intersection of halfspaces of this graph.
    pub fn is_convex(&self, members: &[SignVector]) -> bool {
        if members.is_empty() || members.iter().any(|m| !self.contains(m)) {
            return false;
        }
        let hull = self.hull_sample(members);
        let mut spanned: Vec<SignVector> = self.vertices.iter().filter(|v| hull.below(v)).copied().collect();
        let mut given = members.to_vec();
        given.sort();
        given.dedup();
        spanned.sort();
        spanned == given
    }

    /// The sample fixing exactly the coordinates on which all members agree.
    pub fn hull_sample(&self, members: &[SignVector]) -> SignVector {
        let first = members[0];
        let mut s = first;
        for m in &members[1..] {
            for e in first.sep(m).iter() {
                s.set(e, Sign::Zero);
            }
        }
        s
    }

    /// Whether the induced subgraph on `subset` is isometric (distances equal Hamming).
    pub fn is_isometric_subset(subset: &[SignVector]) -> bool {
        !subset.is_empty() && TopeGraph::new(subset).is_ok()
    }
}

/// A nonempty halfspace intersection of a tope graph.
///
/// Identity is the member set; `osc`, `cross` and `sides` are derived from it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConvexSet {
    members: Vec<SignVector>,
    osc: ElementSet,
    cross: ElementSet,
    sides: SignVector,
}

impl ConvexSet {
    pub fn members(&self) -> &[SignVector] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn osc(&self) -> ElementSet {
        self.osc
    }

    pub fn cross(&self) -> ElementSet {
        self.cross
    }

    /// Sign vector carrying the side of each osculating element, zero elsewhere.
    pub fn sides(&self) -> SignVector {
        self.sides
    }

    pub fn contains(&self, v: &SignVector) -> bool {
        self.members.binary_search(v).is_ok()
    }

    pub fn is_subset_of(&self, set: &HashSet<SignVector>) -> bool {
        self.members.iter().all(|m| set.contains(m))
    }

    pub fn to_tokens(&self) -> Vec<String> {
        self.members.iter().map(|m| m.to_token()).collect()
    }
}

/// Canonical order: decreasing size, then the member sequence in canonical order.
pub fn canonical_convex_order(a: &ConvexSet, b: &ConvexSet) -> std::cmp::Ordering {
    b.len().cmp(&a.len()).then_with(|| a.members.cmp(&b.members))
}

/// The halfspace intersection defined by the nonzero coordinates of `s`.
pub fn convex_from_sample(graph: &TopeGraph, s: &SignVector) -> Result<ConvexSet> {
    if s.len() != graph.ground_len() {
        return Err(Error::GroundMismatch {
            left: graph.ground_len(),
            right: s.len(),
        });
    }
    let members: Vec<SignVector> = graph.vertices().iter().filter(|v| s.below(v)).copied().collect();
    if members.is_empty() {
        return Err(Error::UnrealizableSample(s.to_string()));
    }
    Ok(graph.convex_set(&members))
}

pub fn enumerate_convex_sets(graph: &TopeGraph) -> Result<Vec<ConvexSet>> {
    enumerate_convex_sets_capped(graph, DEFAULT_MAX_UNIVERSE)
}

/// All distinct nonempty halfspace intersections, in canonical order.
pub fn enumerate_convex_sets_capped(graph: &TopeGraph, cap: usize) -> Result<Vec<ConvexSet>> {
    if graph.ground_len() > cap {
        return Err(Error::UniverseTooLarge {
            size: graph.ground_len(),
            cap,
        });
    }
    if graph.is_empty() {
        return Ok(Vec::new());
    }
    let root: Vec<usize> = (0..graph.len()).collect();
    let mut seen: HashSet<Vec<usize>> = HashSet::from([root.clone()]);
    let mut queue = VecDeque::from([root]);
    let mut found = Vec::new();
    while let Some(members) = queue.pop_front() {
        let first = graph.vertices()[members[0]];
        let mut crossing = ElementSet::EMPTY;
        for &m in &members[1..] {
            crossing = crossing.union(first.sep(&graph.vertices()[m]));
        }
        for e in crossing.iter() {
            for s in [Sign::Plus, Sign::Minus] {
                let part: Vec<usize> = members
                    .iter()
                    .copied()
                    .filter(|&m| graph.vertices()[m].get(e) == s)
                    .collect();
                if seen.insert(part.clone()) {
                    queue.push_back(part);
                }
            }
        }
        found.push(members);
    }
    let mut sets: Vec<ConvexSet> = found
        .into_iter()
        .map(|m| {
            let members: Vec<SignVector> = m.iter().map(|&i| graph.vertices()[i]).collect();
            graph.convex_set(&members)
        })
        .collect();
    sets.sort_by(canonical_convex_order);
    Ok(sets)
}

/// Family of shattered element sets and its maximum cardinality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShatterRecord {
    /// Sorted by cardinality, then lexicographically.
    pub shattered: Vec<ElementSet>,
    pub vc: usize,
}

/// Whether the vectors realize all `2^|set|` sign patterns on `set`.
pub fn shatters(vectors: &[SignVector], set: ElementSet) -> bool {
    let k = set.len();
    if k > 20 {
        return false;
    }
    if vectors.len() < 1 << k {
        return false;
    }
    let mut patterns = HashSet::new();
    for v in vectors {
        patterns.insert(v.plus_set().bits() & set.bits());
        if patterns.len() == 1 << k {
            return true;
        }
    }
    patterns.len() == 1 << k
}

pub fn vc_dimension(graph: &TopeGraph) -> ShatterRecord {
    shatter_record(graph.vertices(), graph.ground_len())
}

/// Exhaustive shattering computation, growing candidates level by level.
pub fn shatter_record(vectors: &[SignVector], n: usize) -> ShatterRecord {
    let mut shattered = vec![ElementSet::EMPTY];
    if vectors.is_empty() {
        return ShatterRecord {
            shattered: Vec::new(),
            vc: 0,
        };
    }
    let mut level = vec![ElementSet::EMPTY];
    let mut vc = 0;
    loop {
        let known: HashSet<ElementSet> = level.iter().copied().collect();
        let mut next: Vec<ElementSet> = Vec::new();
        for s in &level {
            let start = s.iter().last().map_or(0, |m| m + 1);
            for e in start..n {
                let mut cand = *s;
                cand.insert(e);
                if cand.iter().all(|x| {
                    let mut sub = cand;
                    sub.remove(x);
                    known.contains(&sub)
                }) && shatters(vectors, cand)
                {
                    next.push(cand);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        next.sort();
        vc += 1;
        shattered.extend(next.iter().copied());
        level = next;
    }
    ShatterRecord { shattered, vc }
}

/// `rank(M \ cross(C)) = rank(M)`.
pub fn is_full(om: &OrientedStructure, c: &ConvexSet) -> Result<bool> {
    let r = om.om_rank()?;
    let deleted = om.delete(c.cross())?;
    Ok(rank(&deleted)? == r)
}
