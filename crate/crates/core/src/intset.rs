//! Bit-packed finite integer sets over an explicit window `[0, bound)`.
//!
//! Every "infinite" set is materialized up to an exclusive bound. Operations
//! that can push elements out of the window return how many were lost.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const WORD_BITS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SetError {
    #[error("value {value} is outside the window [0, {bound})")]
    OutOfBound { value: usize, bound: usize },
    #[error("set windows differ: {left} vs {right}")]
    BoundMismatch { left: usize, right: usize },
    #[error("progression modulus must be at least 2, got {0}")]
    InvalidModulus(usize),
    #[error("malformed set literal: {0}")]
    Parse(String),
}

/// A finite set of nonnegative integers below `bound`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BoundedSet {
    bound: usize,
    words: Vec<u64>,
}

impl BoundedSet {
    pub fn empty(bound: usize) -> Self {
        Self { bound, words: vec![0; bound.div_ceil(WORD_BITS)] }
    }

    /// The full window `[0, bound)`.
    pub fn full(bound: usize) -> Self {
        let mut set = Self { bound, words: vec![!0; bound.div_ceil(WORD_BITS)] };
        set.clear_tail();
        set
    }

    pub fn from_elements<I>(bound: usize, elements: I) -> Result<Self, SetError>
    where
        I: IntoIterator<Item = usize>,
    {
        let mut set = Self::empty(bound);
        for e in elements {
            set.try_insert(e)?;
        }
        Ok(set)
    }

    /// Builds the set `{ e < bound : pred(e) }`.
    pub fn from_predicate(bound: usize, mut pred: impl FnMut(usize) -> bool) -> Self {
        let mut set = Self::empty(bound);
        for e in 0..bound {
            if pred(e) {
                set.insert(e);
            }
        }
        set
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    /// Membership for an in-window value.
    ///
    /// Panics if `t >= bound`; use [`BoundedSet::chi`] for a checked query.
    #[inline]
    pub fn contains(&self, t: usize) -> bool {
        assert!(t < self.bound, "membership query {t} outside window [0, {})", self.bound);
        self.words[t / WORD_BITS] >> (t % WORD_BITS) & 1 == 1
    }

    /// Characteristic function. Queries past the window are errors, never 0.
    pub fn chi(&self, t: usize) -> Result<u8, SetError> {
        if t >= self.bound {
            return Err(SetError::OutOfBound { value: t, bound: self.bound });
        }
        Ok(u8::from(self.contains(t)))
    }

    #[inline]
    pub fn insert(&mut self, e: usize) {
        assert!(e < self.bound, "insert {e} outside window [0, {})", self.bound);
        self.words[e / WORD_BITS] |= 1 << (e % WORD_BITS);
    }

    pub fn try_insert(&mut self, e: usize) -> Result<(), SetError> {
        if e >= self.bound {
            return Err(SetError::OutOfBound { value: e, bound: self.bound });
        }
        self.insert(e);
        Ok(())
    }

    #[inline]
    pub fn remove(&mut self, e: usize) {
        assert!(e < self.bound, "remove {e} outside window [0, {})", self.bound);
        self.words[e / WORD_BITS] &= !(1 << (e % WORD_BITS));
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Elements in increasing order.
    pub fn iter(&self) -> Iter<'_> {
        Iter { words: &self.words, index: 0, current: self.words.first().copied().unwrap_or(0) }
    }

    pub fn min(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn max(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i * WORD_BITS + (WORD_BITS - 1 - w.leading_zeros() as usize))
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn union(&self, other: &Self) -> Result<Self, SetError> {
        self.zip_words(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Result<Self, SetError> {
        self.zip_words(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Self) -> Result<Self, SetError> {
        self.zip_words(other, |a, b| a & !b)
    }

    /// `[0, bound) \ self`.
    pub fn complement(&self) -> Self {
        let mut out = Self { bound: self.bound, words: self.words.iter().map(|w| !w).collect() };
        out.clear_tail();
        out
    }

    pub fn is_disjoint(&self, other: &Self) -> Result<bool, SetError> {
        Ok(self.intersection(other)?.is_empty())
    }

    pub fn is_subset(&self, other: &Self) -> Result<bool, SetError> {
        Ok(self.difference(other)?.is_empty())
    }

    fn zip_words(&self, other: &Self, op: impl Fn(u64, u64) -> u64) -> Result<Self, SetError> {
        if self.bound != other.bound {
            return Err(SetError::BoundMismatch { left: self.bound, right: other.bound });
        }
        let words = self.words.iter().zip(&other.words).map(|(&a, &b)| op(a, b)).collect();
        Ok(Self { bound: self.bound, words })
    }

    /// `a + S`, keeping the window. Returns the shifted set and how many
    /// elements were pushed past the bound.
    pub fn shift(&self, a: usize) -> (Self, usize) {
        let mut out = Self::empty(self.bound);
        let word_shift = a / WORD_BITS;
        let bit_shift = a % WORD_BITS;
        for (i, &w) in self.words.iter().enumerate() {
            if w == 0 {
                continue;
            }
            let lo = i + word_shift;
            if lo < out.words.len() {
                out.words[lo] |= w << bit_shift;
            }
            if bit_shift != 0 && lo + 1 < out.words.len() {
                out.words[lo + 1] |= w >> (WORD_BITS - bit_shift);
            }
        }
        out.clear_tail();
        let dropped = self.len() - out.len();
        (out, dropped)
    }

    /// `S(x)`: the elements that are at most `x` (inclusive).
    pub fn truncate(&self, x: usize) -> Result<Self, SetError> {
        if x >= self.bound {
            return Err(SetError::OutOfBound { value: x, bound: self.bound });
        }
        let mut out = self.clone();
        let keep = x + 1;
        let full_words = keep / WORD_BITS;
        if full_words < out.words.len() {
            out.words[full_words] &= (1u64 << (keep % WORD_BITS)) - 1;
            out.words[full_words + 1..].iter_mut().for_each(|w| *w = 0);
        }
        Ok(out)
    }

    /// Re-windows the set to `[0, new_bound)`. Returns the number of
    /// elements lost when shrinking.
    pub fn rebound(&self, new_bound: usize) -> (Self, usize) {
        let mut out = Self::empty(new_bound);
        let n = out.words.len().min(self.words.len());
        out.words[..n].copy_from_slice(&self.words[..n]);
        out.clear_tail();
        let dropped = self.len() - out.len();
        (out, dropped)
    }

    /// Re-windows to a bound that must not lose any element.
    pub fn widen(&self, new_bound: usize) -> Result<Self, SetError> {
        match self.max() {
            Some(top) if top >= new_bound => Err(SetError::OutOfBound { value: top, bound: new_bound }),
            _ => Ok(self.rebound(new_bound).0),
        }
    }

    fn clear_tail(&mut self) {
        let rem = self.bound % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl Iterator for Iter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        while self.current == 0 {
            self.index += 1;
            self.current = *self.words.get(self.index)?;
        }
        let bit = self.current.trailing_zeros() as usize;
        self.current &= self.current - 1;
        Some(self.index * WORD_BITS + bit)
    }
}

impl<'a> IntoIterator for &'a BoundedSet {
    type Item = usize;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

impl fmt::Debug for BoundedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoundedSet(bound={}, ", self.bound)?;
        f.debug_set().entries(self.iter()).finish()?;
        write!(f, ")")
    }
}

/// Fixture literal: a `bound=<N>` header line followed by one line of
/// comma-separated sorted elements (empty for the empty set).
impl fmt::Display for BoundedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "bound={}", self.bound)?;
        let mut first = true;
        for e in self.iter() {
            if !first {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
            first = false;
        }
        writeln!(f)
    }
}

impl FromStr for BoundedSet {
    type Err = SetError;

    fn from_str(s: &str) -> Result<Self, SetError> {
        let mut lines = s.lines();
        let header = lines.next().ok_or_else(|| SetError::Parse("missing header".into()))?;
        let bound = header
            .strip_prefix("bound=")
            .and_then(|b| b.parse::<usize>().ok())
            .ok_or_else(|| SetError::Parse(format!("bad header {header:?}")))?;
        let body = lines.next().unwrap_or("");
        if let Some(extra) = lines.find(|l| !l.is_empty()) {
            return Err(SetError::Parse(format!("trailing content {extra:?}")));
        }
        let mut set = Self::empty(bound);
        let mut prev: Option<usize> = None;
        for tok in body.split(',').filter(|t| !t.is_empty()) {
            let e: usize = tok.parse().map_err(|_| SetError::Parse(format!("bad element {tok:?}")))?;
            if prev.is_some_and(|p| p >= e) {
                return Err(SetError::Parse(format!("elements not strictly increasing at {e}")));
            }
            set.try_insert(e)?;
            prev = Some(e);
        }
        Ok(set)
    }
}

impl Serialize for BoundedSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            bound: usize,
            elements: Vec<usize>,
        }
        Repr { bound: self.bound, elements: self.iter().collect() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BoundedSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            bound: usize,
            elements: Vec<usize>,
        }
        let repr = Repr::deserialize(deserializer)?;
        BoundedSet::from_elements(repr.bound, repr.elements).map_err(serde::de::Error::custom)
    }
}

/// The excluded progression `{ r + m k : k >= 0 }`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProgressionSpec {
    r: usize,
    m: usize,
}

impl ProgressionSpec {
    pub fn new(r: usize, m: usize) -> Result<Self, SetError> {
        if m < 2 {
            return Err(SetError::InvalidModulus(m));
        }
        Ok(Self { r, m })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn contains(&self, n: usize) -> bool {
        n >= self.r && (n - self.r).is_multiple_of(self.m)
    }

    /// Smallest integer not in the progression.
    pub fn anchor(&self) -> usize {
        if self.r == 0 {
            1
        } else {
            0
        }
    }
}

impl fmt::Display for ProgressionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}+{}k}}", self.r, self.m)
    }
}

/// Number of 1-bits in the binary representation of `n`.
pub fn digit_sum_2(n: u64) -> u32 {
    n.count_ones()
}

pub fn is_evil(n: usize) -> bool {
    digit_sum_2(n as u64).is_multiple_of(2)
}

pub fn progression_set(p: ProgressionSpec, bound: usize) -> BoundedSet {
    let mut set = BoundedSet::empty(bound);
    let mut e = p.r;
    while e < bound {
        set.insert(e);
        e += p.m;
    }
    set
}
