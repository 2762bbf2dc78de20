//! Constructors for every named set family: evil/odious numbers, the
//! weighted-parity sets `H0`/`H1`, the three partition families, `E_u`/`F_u`,
//! and `X`/`Y`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::intset::{is_evil, progression_set, BoundedSet, ProgressionSpec, SetError};

/// Largest family parameter whose weights still fit comfortably in a `usize`.
pub const MAX_PARAM: u32 = 40;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BuildError {
    #[error("weights must be strictly increasing positive integers: {0:?}")]
    BadWeights(Vec<usize>),
    #[error("parameter {0} is too large (max {MAX_PARAM})")]
    ParamTooLarge(u32),
    #[error("value {value} is reachable with both parities (weights {weights:?})")]
    AmbiguousParity { value: usize, weights: Vec<usize> },
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
    #[error(transparent)]
    Set(#[from] SetError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeightKind {
    /// `1, 2, ..., 2^(l-1)`, then `(2^l + 1) 2^j`.
    S1(u32),
    /// `1, 2, ..., 2^(l-2)`, `2^(l-1) + 1`, then `(2^l + 1) 2^j`. Coincides
    /// with `S1(0)` at `l = 0`.
    S2(u32),
    /// `2, 3, 4, 8, 16, ...`
    XY,
    Explicit(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightSequence {
    kind: WeightKind,
}

impl WeightSequence {
    pub fn s1(l: u32) -> Result<Self, BuildError> {
        check_param(l)?;
        Ok(Self { kind: WeightKind::S1(l) })
    }

    pub fn s2(l: u32) -> Result<Self, BuildError> {
        check_param(l)?;
        Ok(Self { kind: WeightKind::S2(l) })
    }

    pub fn xy() -> Self {
        Self { kind: WeightKind::XY }
    }

    pub fn explicit(weights: Vec<usize>) -> Result<Self, BuildError> {
        let ok = weights.first().is_none_or(|&w| w > 0) && weights.windows(2).all(|p| p[0] < p[1]);
        if !ok {
            return Err(BuildError::BadWeights(weights));
        }
        Ok(Self { kind: WeightKind::Explicit(weights) })
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    /// All weights strictly below `bound`, in increasing order.
    pub fn weights_below(&self, bound: usize) -> Vec<usize> {
        let (head, base) = match &self.kind {
            WeightKind::S1(l) => ((0..*l).map(|i| 1usize << i).collect(), (1usize << l) + 1),
            WeightKind::S2(0) => (Vec::new(), 2),
            WeightKind::S2(l) => {
                let mut head: Vec<usize> = (0..l - 1).map(|i| 1usize << i).collect();
                head.push((1usize << (l - 1)) + 1);
                (head, (1usize << l) + 1)
            }
            WeightKind::XY => (vec![2, 3], 4),
            WeightKind::Explicit(ws) => return ws.iter().copied().take_while(|&w| w < bound).collect(),
        };
        let mut out: Vec<usize> = head.into_iter().take_while(|&w| w < bound).collect();
        let mut w = base;
        while w < bound {
            out.push(w);
            w = match w.checked_mul(2) {
                Some(next) => next,
                None => break,
            };
        }
        out
    }
}

fn check_param(l: u32) -> Result<(), BuildError> {
    if l > MAX_PARAM {
        return Err(BuildError::ParamTooLarge(l));
    }
    Ok(())
}

/// Subset sums of a weight sequence split by the parity of the number of
/// weights used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityBuildReport {
    pub even_set: BoundedSet,
    pub odd_set: BoundedSet,
    /// Values reachable with both an even and an odd number of weights.
    pub ambiguous: BoundedSet,
}

/// Parity-tagged subset-sum DP over bitsets. No uniqueness of
/// representation is assumed; collisions land in `ambiguous`.
pub fn build_parity_sets(w: &WeightSequence, bound: usize) -> ParityBuildReport {
    let mut even = BoundedSet::empty(bound);
    let mut odd = BoundedSet::empty(bound);
    if bound > 0 {
        even.insert(0);
    }
    for weight in w.weights_below(bound) {
        let (even_shift, _) = even.shift(weight);
        let (odd_shift, _) = odd.shift(weight);
        let next_even = even.union(&odd_shift).expect("same window");
        let next_odd = odd.union(&even_shift).expect("same window");
        even = next_even;
        odd = next_odd;
    }
    let ambiguous = even.intersection(&odd).expect("same window");
    ParityBuildReport { even_set: even, odd_set: odd, ambiguous }
}

fn unambiguous(w: &WeightSequence, bound: usize) -> Result<(BoundedSet, BoundedSet), BuildError> {
    let report = build_parity_sets(w, bound);
    if let Some(value) = report.ambiguous.min() {
        return Err(BuildError::AmbiguousParity { value, weights: w.weights_below(bound) });
    }
    Ok((report.even_set, report.odd_set))
}

/// `(U, V)` restricted to `[0, bound)`: even and odd binary digit sums.
pub fn build_evil_odious(bound: usize) -> (BoundedSet, BoundedSet) {
    let u = BoundedSet::from_predicate(bound, is_evil);
    let v = u.complement();
    (u, v)
}

/// `(U_l, V_l) = (U, V) ∩ [0, 2^l - 1]`, windowed to `[0, 2^l)`.
pub fn evil_odious_prefix(l: u32) -> (BoundedSet, BoundedSet) {
    build_evil_odious(1 << l)
}

/// The three solution shapes of the classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    S1T1(u32),
    S2T2(u32),
    S1T1Shifted(u32),
}

impl Family {
    pub fn param(&self) -> u32 {
        match *self {
            Family::S1T1(l) | Family::S2T2(l) | Family::S1T1Shifted(l) => l,
        }
    }

    /// Short family name without the parameter.
    pub fn tag(&self) -> &'static str {
        match self {
            Family::S1T1(_) => "s1t1",
            Family::S2T2(_) => "s2t2",
            Family::S1T1Shifted(_) => "s1t1+1",
        }
    }

    pub fn from_tag(tag: &str, l: u32) -> Option<Self> {
        match tag {
            "s1t1" => Some(Family::S1T1(l)),
            "s2t2" => Some(Family::S2T2(l)),
            "s1t1+1" => Some(Family::S1T1Shifted(l)),
            _ => None,
        }
    }

    /// The progression left uncovered by `A ∪ B`.
    pub fn progression(&self) -> ProgressionSpec {
        let l = self.param();
        let m = (1usize << l) + 1;
        let r = match self {
            Family::S1T1(_) => 1 << l,
            Family::S1T1Shifted(_) => 0,
            Family::S2T2(_) => s2_offset(l),
        };
        ProgressionSpec::new(r, m).expect("2^l + 1 >= 2")
    }

    /// Every family with parameter at most `l_max`.
    pub fn all_up_to(l_max: u32) -> impl Iterator<Item = Family> {
        (0..=l_max).flat_map(|l| [Family::S1T1(l), Family::S2T2(l), Family::S1T1Shifted(l)])
    }
}

/// Offset of the progression missed by `S2(l) ∪ T2(l)`: 1 at `l = 0`, else `2^(l-1)`.
pub fn s2_offset(l: u32) -> usize {
    if l == 0 {
        1
    } else {
        1 << (l - 1)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.tag(), self.param())
    }
}

impl FromStr for Family {
    type Err = BuildError;

    fn from_str(s: &str) -> Result<Self, BuildError> {
        let unknown = || BuildError::UnknownFamily(s.to_string());
        let (tag, l) = s.split_once(':').ok_or_else(unknown)?;
        let l: u32 = l.parse().map_err(|_| unknown())?;
        Family::from_tag(tag, l).ok_or_else(unknown)
    }
}

/// A built partition `A ∪ B ∪ excluded = [0, bound)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilySets {
    pub family: Family,
    pub a: BoundedSet,
    pub b: BoundedSet,
    /// The predicted complement progression, windowed.
    pub excluded: BoundedSet,
}

pub fn build_family(family: Family, bound: usize) -> Result<FamilySets, BuildError> {
    let (a, b) = match family {
        Family::S1T1(l) => unambiguous(&WeightSequence::s1(l)?, bound)?,
        Family::S2T2(l) => unambiguous(&WeightSequence::s2(l)?, bound)?,
        Family::S1T1Shifted(l) => {
            let (s, t) = unambiguous(&WeightSequence::s1(l)?, bound)?;
            (s.shift(1).0, t.shift(1).0)
        }
    };
    let excluded = progression_set(family.progression(), bound);
    Ok(FamilySets { family, a, b, excluded })
}

fn exact_window(bound: usize, parts: &[(&BoundedSet, usize)], extra: &[usize]) -> BoundedSet {
    let mut out = BoundedSet::empty(bound);
    for &(part, offset) in parts {
        for e in part.iter() {
            out.insert(e + offset);
        }
    }
    for &e in extra {
        out.insert(e);
    }
    out
}

/// `E_u` and `F_u`, windowed to `[0, 2^(u+1) + 2^u + 2)`.
pub fn build_ef(u: u32) -> Result<(BoundedSet, BoundedSet), BuildError> {
    check_param(u)?;
    let low = 1usize << u;
    let high = 1usize << (u + 1);
    let bound = high + low + 2;
    let (uu, vu) = evil_odious_prefix(u);
    let e = exact_window(bound, &[(&uu, 0), (&vu, low + 1), (&vu, high + 1)], &[]);
    let f = exact_window(bound, &[(&vu, 0), (&uu, low + 1), (&uu, high + 1)], &[high + 1 + low]);
    Ok((e, f))
}

/// `X = H0(2, 3, 4, 8, ...)`, `Y = H1(2, 3, 4, 8, ...)`.
pub fn build_xy(bound: usize) -> Result<(BoundedSet, BoundedSet), BuildError> {
    unambiguous(&WeightSequence::xy(), bound)
}

/// Any set family addressable by name: `s1t1:<l>`, `s2t2:<l>`, `s1t1+1:<l>`,
/// `ef:<u>`, `xy`, `uv`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedFamily {
    Partition(Family),
    EF(u32),
    XY,
    UV,
}

impl FromStr for NamedFamily {
    type Err = BuildError;

    fn from_str(s: &str) -> Result<Self, BuildError> {
        match s {
            "xy" => return Ok(NamedFamily::XY),
            "uv" => return Ok(NamedFamily::UV),
            _ => {}
        }
        if let Some(u) = s.strip_prefix("ef:") {
            let u = u.parse().map_err(|_| BuildError::UnknownFamily(s.to_string()))?;
            return Ok(NamedFamily::EF(u));
        }
        s.parse().map(NamedFamily::Partition)
    }
}

/// A named pair of sets with its uncovered remainder of the window.
#[derive(Debug, Clone)]
pub struct NamedPair {
    pub first: BoundedSet,
    pub second: BoundedSet,
    pub excluded: BoundedSet,
}

impl NamedFamily {
    /// Builds the pair. `bound` is ignored for `ef:<u>`, whose window is fixed.
    pub fn build(&self, bound: usize) -> Result<NamedPair, BuildError> {
        let (first, second) = match *self {
            NamedFamily::Partition(f) => {
                let built = build_family(f, bound)?;
                return Ok(NamedPair { first: built.a, second: built.b, excluded: built.excluded });
            }
            NamedFamily::EF(u) => build_ef(u)?,
            NamedFamily::XY => build_xy(bound)?,
            NamedFamily::UV => build_evil_odious(bound),
        };
        let excluded = first.union(&second)?.complement();
        Ok(NamedPair { first, second, excluded })
    }
}
