//! Exact rational generators for realizable OMs and affine OMs, and the
//! named test instances.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::axioms::OrientedStructure;
use crate::error::{Error, ParseError, Result};
use crate::program::AffineOM;
use crate::sign::{GroundSet, Sign, SignSystem, SignVector};

/// Dense `rows × cols` matrix of exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigRational>,
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

impl RationalMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigRational>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries, found {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(RationalMatrix { rows, cols, entries })
    }

    pub fn from_integers(rows: usize, cols: usize, entries: &[i64]) -> Result<Self> {
        RationalMatrix::new(rows, cols, entries.iter().map(|&v| int(v)).collect())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<BigRational>]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::InvalidArgument("columns of different lengths".into()));
        }
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in columns {
                entries.push(c[r].clone());
            }
        }
        RationalMatrix::new(rows, cols, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigRational {
        &self.entries[r * self.cols + c]
    }

    pub fn column(&self, c: usize) -> Vec<BigRational> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn row(&self, r: usize) -> Vec<BigRational> {
        (0..self.cols).map(|c| self.get(r, c).clone()).collect()
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        let rows: Vec<Vec<BigRational>> = (0..self.rows).map(|r| self.row(r)).collect();
        row_echelon(rows).len()
    }

    /// Parses `d n` followed by `d·n` row-major entries (`p/q` or integers).
    pub fn parse(text: &str) -> Result<Self> {
        let mut tokens = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let content = line.split('#').next().unwrap_or("");
            let mut offset = 0;
            for tok in content.split_whitespace() {
                let col = content[offset..].find(tok).unwrap() + offset;
                offset = col + tok.len();
                tokens.push((ln + 1, col + 1, tok));
            }
        }
        let mut it = tokens.into_iter();
        let mut header = |what: &str| -> Result<usize> {
            let (l, c, t) = it
                .next()
                .ok_or_else(|| ParseError::new(format!("missing {what} in matrix header")))?;
            t.parse::<usize>()
                .map_err(|_| ParseError::at(l, c, format!("invalid {what} {t:?}")).into())
        };
        let rows = header("row count")?;
        let cols = header("column count")?;
        let mut entries = Vec::with_capacity(rows * cols);
        for (l, c, t) in it.by_ref() {
            entries.push(parse_rational(t).ok_or_else(|| ParseError::at(l, c, format!("invalid rational {t:?}")))?);
        }
        if entries.len() != rows * cols {
            return Err(ParseError::new(format!("expected {} entries, found {}", rows * cols, entries.len())).into());
        }
        RationalMatrix::new(rows, cols, entries)
    }
}

fn parse_rational(t: &str) -> Option<BigRational> {
    match t.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.parse().ok()?;
            let q: BigInt = q.parse().ok()?;
            if q.is_zero() {
                None
            } else {
                Some(BigRational::new(p, q))
            }
        }
        None => t.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|v| v.to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
}

/// Nonzero rows of a reduced row echelon form.
fn row_echelon(mut rows: Vec<Vec<BigRational>>) -> Vec<Vec<BigRational>> {
    let width = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..width {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank][col].clone();
        for v in rows[rank].iter_mut() {
            *v = &*v / &pivot;
        }
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                let pivot_row = rows[rank].clone();
                for (v, pv) in rows[r].iter_mut().zip(&pivot_row) {
                    *v = &*v - &factor * pv;
                }
            }
        }
        rank += 1;
    }
    rows.truncate(rank);
    rows
}

/// Basis of `{x | a·x = 0 for all a in eqs}` in dimension `d`.
fn null_space(eqs: &[Vec<BigRational>], d: usize) -> Vec<Vec<BigRational>> {
    let rref = row_echelon(eqs.to_vec());
    let mut pivots = Vec::new();
    for row in &rref {
        pivots.push(row.iter().position(|v| !v.is_zero()).unwrap());
    }
    let mut basis = Vec::new();
    for free in (0..d).filter(|c| !pivots.contains(c)) {
        let mut v = vec![BigRational::zero(); d];
        v[free] = BigRational::one();
        for (row, &p) in rref.iter().zip(&pivots) {
            v[p] = -row[free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Whether some `y` satisfies `a·y > 0` for every row `a` (Fourier–Motzkin).
fn strictly_feasible(mut rows: Vec<Vec<BigRational>>, vars: usize) -> bool {
    for k in 0..vars {
        if rows.iter().any(|r| r.iter().all(Zero::is_zero)) {
            return false;
        }
        let (pos, rest): (Vec<_>, Vec<_>) = rows.into_iter().partition(|r| r[k].is_positive());
        let (neg, zero): (Vec<_>, Vec<_>) = rest.into_iter().partition(|r| r[k].is_negative());
        let mut next = zero;
        if !pos.is_empty() && !neg.is_empty() {
            for p in &pos {
                for q in &neg {
                    let a = -q[k].clone();
                    let b = p[k].clone();
                    let mut combined: Vec<BigRational> = p.iter().zip(q).map(|(pv, qv)| &a * pv + &b * qv).collect();
                    normalize(&mut combined);
                    next.push(combined);
                }
            }
        }
        next.sort();
        next.dedup();
        rows = next;
    }
    rows.is_empty()
}

fn normalize(row: &mut [BigRational]) {
    if let Some(first) = row.iter().find(|v| !v.is_zero()).map(|v| v.abs()) {
        for v in row.iter_mut() {
            *v = &*v / &first;
        }
    }
}

/// Whether some `x` realizes the sign pattern `s` on the given vectors.
fn pattern_feasible(vectors: &[Vec<BigRational>], s: &[Sign], d: usize) -> bool {
    let eqs: Vec<Vec<BigRational>> = vectors
        .iter()
        .zip(s)
        .filter(|(_, s)| s.is_zero())
        .map(|(v, _)| v.clone())
        .collect();
    let basis = null_space(&eqs, d);
    let strict: Vec<Vec<BigRational>> = vectors
        .iter()
        .zip(s)
        .filter(|(_, s)| !s.is_zero())
        .map(|(v, s)| {
            let row: Vec<BigRational> = basis.iter().map(|b| dot(v, b)).collect();
            if *s == Sign::Minus {
                row.into_iter().map(|x| -x).collect()
            } else {
                row
            }
        })
        .collect();
    if strict.is_empty() {
        return true;
    }
    strictly_feasible(strict, basis.len())
}

/// Covectors `{sign(⟨x, v_i⟩)_i | x ∈ Q^d}` for the columns `v_i` of `m`.
pub fn covectors_of_columns(m: &RationalMatrix) -> Result<Vec<SignVector>> {
    let n = m.cols();
    let d = m.rows();
    let vectors: Vec<Vec<BigRational>> = (0..n).map(|c| m.column(c)).collect();
    if n == 0 || vectors.iter().all(|v| v.iter().all(Zero::is_zero)) {
        return Err(Error::DegenerateInput("all vectors are zero".into()));
    }
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(n);
    search(&vectors, d, &mut prefix, &mut out);
    Ok(out)
}

fn search(vectors: &[Vec<BigRational>], d: usize, prefix: &mut Vec<Sign>, out: &mut Vec<SignVector>) {
    if prefix.len() == vectors.len() {
        out.push(SignVector::from_signs(prefix));
        return;
    }
    for s in [Sign::Plus, Sign::Minus, Sign::Zero] {
        prefix.push(s);
        if pattern_feasible(&vectors[..prefix.len()], prefix, d) {
            search(vectors, d, prefix, out);
        }
        prefix.pop();
    }
}

/// The OM realized by the columns of `m`, validated by the axiom checker.
pub fn om_from_vectors(m: &RationalMatrix) -> Result<OrientedStructure> {
    let system = SignSystem::from_vectors(m.cols(), covectors_of_columns(m)?)?;
    OrientedStructure::om(system)
}

/// Homogenizes hyperplanes `h_i · x = b_i` (rows of `h`) with a last element
/// `g` and returns the affine OM `(M, g)`.
pub fn affine_from_points(h: &RationalMatrix, offsets: &[BigRational]) -> Result<AffineOM> {
    if offsets.len() != h.rows() {
        return Err(Error::InvalidArgument(format!(
            "{} hyperplanes but {} offsets",
            h.rows(),
            offsets.len()
        )));
    }
    let d = h.cols();
    let mut columns: Vec<Vec<BigRational>> = (0..h.rows())
        .map(|r| {
            let mut c = h.row(r);
            c.push(-offsets[r].clone());
            c
        })
        .collect();
    let mut g = vec![BigRational::zero(); d + 1];
    g[d] = BigRational::one();
    columns.push(g);
    let m = RationalMatrix::from_columns(&columns)?;
    let base = om_from_vectors(&m)?;
    AffineOM::new(base, h.rows())
}

#[derive(Debug, Clone)]
pub enum InstanceStructure {
    Om(OrientedStructure),
    Affine(AffineOM),
}

#[derive(Debug, Clone)]
pub struct NamedInstance {
    pub key: String,
    pub structure: InstanceStructure,
    pub notes: String,
}

impl NamedInstance {
    /// The covectors of the instance: the OM itself, or the affine halfspace.
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
}

/// Largest parameter accepted by the parametrised instance families.
pub const MAX_INSTANCE_PARAMETER: usize = 8;

fn parse_key(key: &str) -> Option<(&str, Vec<usize>)> {
    let key = key.trim();
    match key.split_once('(') {
        None => Some((key, Vec::new())),
        Some((name, rest)) => {
            let args = rest.strip_suffix(')')?;
            let nums: Option<Vec<usize>> = args.split(',').map(|a| a.trim().parse().ok()).collect();
            Some((name, nums?))
        }
    }
}

pub fn named_instance(key: &str) -> Result<NamedInstance> {
    let unknown = || Error::UnknownKey(key.to_string());
    let (name, args) = parse_key(key).ok_or_else(unknown)?;
    let in_range = |v: usize, lo: usize| v >= lo && v <= MAX_INSTANCE_PARAMETER;
    let (structure, notes) = match (name, args.as_slice()) {
        ("paper4", []) => {
            let cols: Vec<Vec<BigRational>> = (1..=4).map(|p| vec![int(1), int(-p)]).collect();
            let om = named_om(om_from_vectors(&RationalMatrix::from_columns(&cols)?)?, "p")?;
            (
                InstanceStructure::Om(om),
                "four collinear points p_i = i, linear classifiers".to_string(),
            )
        }
        ("cycle", [n]) if in_range(*n, 2) => {
            let cols: Vec<Vec<BigRational>> = (0..*n as i64).map(|i| vec![int(1), int(i)]).collect();
            let om = om_from_vectors(&RationalMatrix::from_columns(&cols)?)?;
            (
                InstanceStructure::Om(om),
                format!("rank 2 uniform on {n} elements, vectors (1, i)"),
            )
        }
        ("cube", [n]) if in_range(*n, 1) => {
            let cols: Vec<Vec<BigRational>> = (0..*n)
                .map(|i| (0..*n).map(|j| int((i == j) as i64)).collect())
                .collect();
            let om = om_from_vectors(&RationalMatrix::from_columns(&cols)?)?;
            (InstanceStructure::Om(om), format!("standard basis of Q^{n}"))
        }
        ("unif", [3, n]) if in_range(*n, 3) => {
            let cols: Vec<Vec<BigRational>> = (0..*n as i64).map(|i| vec![int(1), int(i), int(i * i)]).collect();
            let om = om_from_vectors(&RationalMatrix::from_columns(&cols)?)?;
            (
                InstanceStructure::Om(om),
                format!("rank 3 uniform on {n} elements, vectors (1, i, i^2)"),
            )
        }
        ("tri", []) => {
            let h = RationalMatrix::from_integers(3, 2, &[1, 0, 0, 1, 1, 1])?;
            let a = affine_from_points(&h, &[int(0), int(0), int(1)])?;
            (
                InstanceStructure::Affine(a),
                "affine lines x = 0, y = 0, x + y = 1".to_string(),
            )
        }
        ("path", [k]) if in_range(*k, 1) => {
            let m = k - 1;
            let h = RationalMatrix::from_integers(m, 1, &vec![1; m])?;
            let offsets: Vec<BigRational> = (1..=m as i64).map(int).collect();
            let a = affine_from_points(&h, &offsets)?;
            (
                InstanceStructure::Affine(a),
                format!("{m} points on a line, {k} regions"),
            )
        }
        _ => return Err(unknown()),
    };
    Ok(NamedInstance {
        key: key.trim().to_string(),
        structure,
        notes,
    })
}

fn named_om(om: OrientedStructure, prefix: &str) -> Result<OrientedStructure> {
    let names = (1..=om.ground_len()).map(|i| format!("{prefix}{i}")).collect();
    OrientedStructure::om(om.system().with_ground(GroundSet::named(names)?)?)
}
