//! Sign vectors over a small finite ground set, and systems of them.
//!
//! A [`SignVector`] stores its positive and negative coordinates as two
//! disjoint bit masks; zero is implicit. The canonical order of sign vectors
//! (used everywhere a deterministic order is needed) compares the textual
//! renderings, coordinate by coordinate, with `+` < `-` < `0`.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::ops::{Mul, Neg};
use std::str::FromStr;

use crate::error::{Error, ParseError, Result};

/// Largest ground set a [`SignVector`] can represent.
pub const MAX_ELEMENTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
    Zero,
}

impl Sign {
    pub fn to_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
            Sign::Zero => '0',
        }
    }

    pub fn from_char(c: char) -> Option<Sign> {
        match c {
            '+' => Some(Sign::Plus),
            '-' => Some(Sign::Minus),
            '0' => Some(Sign::Zero),
            _ => None,
        }
    }

    pub fn is_zero(self) -> bool {
        self == Sign::Zero
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, other: Sign) -> Sign {
        match (self, other) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Plus,
            _ => Sign::Minus,
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
            Sign::Zero => Sign::Zero,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// A set of ground-set elements, as a bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ElementSet(pub u64);

impl ElementSet {
    pub const EMPTY: ElementSet = ElementSet(0);

    pub fn full(n: usize) -> Self {
        ElementSet(low_mask(n))
    }

    pub fn singleton(e: usize) -> Self {
        ElementSet(1 << e)
    }

    pub fn from_elements<I: IntoIterator<Item = usize>>(it: I) -> Self {
        ElementSet(it.into_iter().fold(0, |m, e| m | (1 << e)))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, e: usize) -> bool {
        e < MAX_ELEMENTS && self.0 >> e & 1 == 1
    }

    pub fn insert(&mut self, e: usize) {
        self.0 |= 1 << e;
    }

    pub fn remove(&mut self, e: usize) {
        self.0 &= !(1 << e);
    }

    pub fn union(self, other: Self) -> Self {
        ElementSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        ElementSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        ElementSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let e = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(e)
            }
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Renders with 1-based ids, e.g. `{1,4}`.
    pub fn display_one_based(self) -> String {
        let ids: Vec<String> = self.iter().map(|e| (e + 1).to_string()).collect();
        format!("{{{}}}", ids.join(","))
    }
}

/// Orders by cardinality first, then by the sorted element sequence.
impl Ord for ElementSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.iter().cmp(other.iter()))
    }
}

impl PartialOrd for ElementSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.iter().map(|e| e.to_string()).collect();
        write!(f, "{{{}}}", ids.join(","))
    }
}

impl FromIterator<usize> for ElementSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        ElementSet::from_elements(iter)
    }
}

pub(crate) fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// An element of `{+,-,0}^U` for a ground set `U = {0, .., len-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignVector {
    plus: u64,
    minus: u64,
    len: u8,
}

impl SignVector {
    pub fn zero(len: usize) -> Self {
        assert!(len <= MAX_ELEMENTS, "ground set too large");
        SignVector {
            plus: 0,
            minus: 0,
            len: len as u8,
        }
    }

    pub fn from_sets(len: usize, plus: ElementSet, minus: ElementSet) -> Result<Self> {
        if len > MAX_ELEMENTS {
            return Err(Error::InvalidArgument(format!("ground set of {len} elements")));
        }
        let mask = low_mask(len);
        if plus.0 & minus.0 != 0 || (plus.0 | minus.0) & !mask != 0 {
            return Err(Error::InvalidArgument(
                "plus and minus sets must be disjoint subsets of the ground set".into(),
            ));
        }
        Ok(SignVector {
            plus: plus.0,
            minus: minus.0,
            len: len as u8,
        })
    }

    pub(crate) fn from_masks(len: usize, plus: u64, minus: u64) -> Self {
        debug_assert_eq!(plus & minus, 0);
        debug_assert_eq!((plus | minus) & !low_mask(len), 0);
        SignVector {
            plus,
            minus,
            len: len as u8,
        }
    }

    pub fn from_signs(signs: &[Sign]) -> Self {
        let mut v = SignVector::zero(signs.len());
        for (e, &s) in signs.iter().enumerate() {
            v.set(e, s);
        }
        v
    }

    /// All `2^len` full-support vectors.
    pub fn all_topes(len: usize) -> impl Iterator<Item = SignVector> {
        let mask = low_mask(len);
        (0..=mask).map(move |p| SignVector::from_masks(len, p, mask & !p))
    }

    /// All `3^len` sign vectors.
    pub fn all(len: usize) -> Vec<SignVector> {
        let mut out = vec![SignVector::zero(len)];
        for e in 0..len {
            let mut next = Vec::with_capacity(out.len() * 3);
            for v in &out {
                for s in [Sign::Plus, Sign::Minus, Sign::Zero] {
                    let mut w = *v;
                    w.set(e, s);
                    next.push(w);
                }
            }
            out = next;
        }
        out
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn plus_set(&self) -> ElementSet {
        ElementSet(self.plus)
    }

    pub fn minus_set(&self) -> ElementSet {
        ElementSet(self.minus)
    }

    pub fn support(&self) -> ElementSet {
        ElementSet(self.plus | self.minus)
    }

    pub fn zero_set(&self) -> ElementSet {
        ElementSet(low_mask(self.len()) & !(self.plus | self.minus))
    }

    pub fn is_zero(&self) -> bool {
        self.plus | self.minus == 0
    }

    pub fn is_tope(&self) -> bool {
        self.plus | self.minus == low_mask(self.len())
    }

    pub fn get(&self, e: usize) -> Sign {
        if self.plus >> e & 1 == 1 {
            Sign::Plus
        } else if self.minus >> e & 1 == 1 {
            Sign::Minus
        } else {
            Sign::Zero
        }
    }

    pub fn set(&mut self, e: usize, s: Sign) {
        assert!(e < self.len(), "element {e} out of range");
        let bit = 1u64 << e;
        self.plus &= !bit;
        self.minus &= !bit;
        match s {
            Sign::Plus => self.plus |= bit,
            Sign::Minus => self.minus |= bit,
            Sign::Zero => {}
        }
    }

    pub fn with(mut self, e: usize, s: Sign) -> Self {
        self.set(e, s);
        self
    }

    fn check_ground(&self, other: &Self) -> Result<()> {
        if self.len != other.len {
            return Err(Error::GroundMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(())
    }

    /// `X ∘ Y`: coordinates of `self` where nonzero, else those of `other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_ground(other)?;
        Ok(self.circ(other))
    }

    /// Unchecked composition; panics in debug builds on a ground mismatch.
    pub fn circ(&self, other: &Self) -> Self {
        debug_assert_eq!(self.len, other.len);
        let supp = self.plus | self.minus;
        SignVector {
            plus: self.plus | (other.plus & !supp),
            minus: self.minus | (other.minus & !supp),
            len: self.len,
        }
    }

    pub fn separator(&self, other: &Self) -> Result<ElementSet> {
        self.check_ground(other)?;
        Ok(self.sep(other))
    }

    pub fn sep(&self, other: &Self) -> ElementSet {
        debug_assert_eq!(self.len, other.len);
        ElementSet((self.plus & other.minus) | (self.minus & other.plus))
    }

    /// `X ≤ Y` in the conformal order: every nonzero coordinate of `X` agrees with `Y`.
    pub fn conforms_below(&self, other: &Self) -> Result<bool> {
        self.check_ground(other)?;
        Ok(self.below(other))
    }

    pub fn below(&self, other: &Self) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.plus & !other.plus == 0 && self.minus & !other.minus == 0
    }

    pub fn strictly_below(&self, other: &Self) -> bool {
        self.below(other) && self != other
    }

    /// Drops the coordinates in `removed`, renumbering the rest densely.
    pub fn delete(&self, removed: ElementSet) -> Self {
        let kept: Vec<usize> = (0..self.len()).filter(|e| !removed.contains(*e)).collect();
        self.restrict(&kept)
    }

    /// Keeps the listed coordinates, in the listed order.
    pub fn restrict(&self, kept: &[usize]) -> Self {
        let mut v = SignVector::zero(kept.len());
        for (i, &e) in kept.iter().enumerate() {
            v.set(i, self.get(e));
        }
        v
    }

    /// Places `self` (over `kept.len()` coordinates) into a zero vector of length `len`.
    pub fn embed(&self, kept: &[usize], len: usize) -> Self {
        debug_assert_eq!(kept.len(), self.len());
        let mut v = SignVector::zero(len);
        for (i, &e) in kept.iter().enumerate() {
            v.set(e, self.get(i));
        }
        v
    }

    /// Appends one coordinate at index `len`.
    pub fn push(&self, s: Sign) -> Self {
        let mut v = SignVector::zero(self.len() + 1);
        v.plus = self.plus;
        v.minus = self.minus;
        v.set(self.len(), s);
        v
    }

    /// Flips the sign of coordinate `e`.
    pub fn reorient(&self, e: usize) -> Self {
        let s = self.get(e);
        self.with(e, -s)
    }

    pub fn signs(&self) -> impl Iterator<Item = Sign> + '_ {
        (0..self.len()).map(|e| self.get(e))
    }

    pub fn to_token(&self) -> String {
        self.signs().map(Sign::to_char).collect()
    }

    pub fn parse_token(token: &str) -> Option<Self> {
        let signs: Option<Vec<Sign>> = token.chars().map(Sign::from_char).collect();
        let signs = signs?;
        if signs.len() > MAX_ELEMENTS {
            return None;
        }
        Some(SignVector::from_signs(&signs))
    }
}

impl Neg for SignVector {
    type Output = SignVector;

    fn neg(self) -> SignVector {
        SignVector {
            plus: self.minus,
            minus: self.plus,
            len: self.len,
        }
    }
}

fn sign_rank(s: Sign) -> u8 {
    match s {
        Sign::Plus => 0,
        Sign::Minus => 1,
        Sign::Zero => 2,
    }
}

impl Ord for SignVector {
    fn cmp(&self, other: &Self) -> Ordering {
        for e in 0..self.len().min(other.len()) {
            match sign_rank(self.get(e)).cmp(&sign_rank(other.get(e))) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        self.len.cmp(&other.len)
    }
}

impl PartialOrd for SignVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_token())
    }
}

impl FromStr for SignVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SignVector::parse_token(s).ok_or_else(|| Error::Parse(ParseError::new(format!("invalid sign vector {s:?}"))))
    }
}

/// The ground set `U`: dense ids `0..len`, optionally with display names.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroundSet {
    len: usize,
    names: Option<Vec<String>>,
}

impl GroundSet {
    pub fn new(len: usize) -> Self {
        GroundSet { len, names: None }
    }

    pub fn named(names: Vec<String>) -> Result<Self> {
        let mut seen = HashSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(Error::InvalidArgument(format!("duplicate element name {n:?}")));
            }
        }
        Ok(GroundSet {
            len: names.len(),
            names: Some(names),
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn name(&self, e: usize) -> String {
        match &self.names {
            Some(n) => n[e].clone(),
            None => (e + 1).to_string(),
        }
    }

    /// Resolves an element by display name, falling back to a 1-based id.
    pub fn lookup(&self, key: &str) -> Option<usize> {
        if let Some(names) = &self.names {
            if let Some(i) = names.iter().position(|n| n == key) {
                return Some(i);
            }
        }
        key.parse::<usize>()
            .ok()
            .filter(|&e| e >= 1 && e <= self.len)
            .map(|e| e - 1)
    }

    /// The ground set left after removing `removed`.
    pub fn delete(&self, removed: ElementSet) -> GroundSet {
        let kept: Vec<usize> = (0..self.len).filter(|e| !removed.contains(*e)).collect();
        self.restrict(&kept)
    }

    pub fn restrict(&self, kept: &[usize]) -> GroundSet {
        GroundSet {
            len: kept.len(),
            names: self
                .names
                .as_ref()
                .map(|n| kept.iter().map(|&e| n[e].clone()).collect()),
        }
    }

    /// Appends an element; named ground sets get `name`, made unique if needed.
    pub fn push(&self, name: &str) -> GroundSet {
        GroundSet {
            len: self.len + 1,
            names: self.names.as_ref().map(|n| {
                let mut candidate = name.to_string();
                while n.contains(&candidate) {
                    candidate.push('\'');
                }
                let mut n = n.clone();
                n.push(candidate);
                n
            }),
        }
    }
}

/// A finite set of sign vectors over one ground set, kept sorted in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignSystem {
    ground: GroundSet,
    vectors: Vec<SignVector>,
}

impl SignSystem {
    /// Builds a system, sorting and removing duplicates.
    pub fn new(ground: GroundSet, vectors: impl IntoIterator<Item = SignVector>) -> Result<Self> {
        let mut vectors: Vec<SignVector> = vectors.into_iter().collect();
        for v in &vectors {
            if v.len() != ground.len() {
                return Err(Error::GroundMismatch {
                    left: ground.len(),
                    right: v.len(),
                });
            }
        }
        vectors.sort();
        vectors.dedup();
        Ok(SignSystem { ground, vectors })
    }

    pub fn from_vectors(len: usize, vectors: impl IntoIterator<Item = SignVector>) -> Result<Self> {
        SignSystem::new(GroundSet::new(len), vectors)
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn ground_len(&self) -> usize {
        self.ground.len()
    }

    pub fn vectors(&self) -> &[SignVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn contains(&self, v: &SignVector) -> bool {
        self.vectors.binary_search(v).is_ok()
    }

    pub fn index_of(&self, v: &SignVector) -> Option<usize> {
        self.vectors.binary_search(v).ok()
    }

    pub fn topes(&self) -> Vec<SignVector> {
        self.vectors.iter().copied().filter(SignVector::is_tope).collect()
    }

    pub fn with_ground(&self, ground: GroundSet) -> Result<Self> {
        SignSystem::new(ground, self.vectors.iter().copied())
    }
}

/// Note produced while parsing a `.sv` document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseWarning {
    pub line: usize,
    pub message: String,
}

/// Parses the `.sv` format: optional `elements: ...` header, `#` comments, one token per line.
pub fn parse_system(text: &str) -> Result<(SignSystem, Vec<ParseWarning>)> {
    let mut names: Option<Vec<String>> = None;
    let mut width: Option<usize> = None;
    let mut vectors = Vec::new();
    let mut seen = HashSet::new();
    let mut warnings = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("elements:") {
            if names.is_some() || !vectors.is_empty() {
                return Err(ParseError::at(line_no, 1, "header must precede all sign vectors").into());
            }
            let list: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
            if list.is_empty() {
                return Err(ParseError::at(line_no, 1, "empty element list").into());
            }
            let ground = GroundSet::named(list.clone()).map_err(|e| ParseError::at(line_no, 1, e.to_string()))?;
            width = Some(ground.len());
            names = Some(list);
            continue;
        }
        let col0 = content.len() - content.trim_start().len();
        if trimmed.split_whitespace().count() != 1 {
            return Err(ParseError::at(line_no, col0 + 1, "expected one token per line").into());
        }
        let mut signs = Vec::with_capacity(trimmed.len());
        for (i, c) in trimmed.chars().enumerate() {
            match Sign::from_char(c) {
                Some(s) => signs.push(s),
                None => {
                    return Err(ParseError::at(
                        line_no,
                        col0 + i + 1,
                        format!("unexpected character {c:?}, expected one of + - 0"),
                    )
                    .into())
                }
            }
        }
        if signs.len() > MAX_ELEMENTS {
            return Err(ParseError::at(line_no, col0 + 1, "too many elements").into());
        }
        match width {
            Some(w) if w != signs.len() => {
                return Err(
                    ParseError::at(line_no, col0 + 1, format!("expected {w} signs, found {}", signs.len())).into(),
                )
            }
            None => width = Some(signs.len()),
            _ => {}
        }
        let v = SignVector::from_signs(&signs);
        if !seen.insert(v) {
            warnings.push(ParseWarning {
                line: line_no,
                message: format!("duplicate sign vector {v} dropped"),
            });
            continue;
        }
        vectors.push(v);
    }

    if vectors.is_empty() {
        return Err(Error::EmptySystem);
    }
    let ground = match names {
        Some(n) => GroundSet::named(n)?,
        None => GroundSet::new(width.unwrap_or(0)),
    };
    Ok((SignSystem::new(ground, vectors)?, warnings))
}

/// Canonical `.sv` rendering: header only for named ground sets, vectors in canonical order.
pub fn serialize_system(system: &SignSystem) -> String {
    let mut out = String::new();
    if let Some(names) = system.ground().names() {
        out.push_str("elements: ");
        out.push_str(&names.join(" "));
        out.push('\n');
    }
    for v in system.vectors() {
        out.push_str(&v.to_token());
        out.push('\n');
    }
    out
}
