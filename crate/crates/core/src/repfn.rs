//! Representation functions `R1` (ordered pairs), `R2` (strict pairs) and
//! `R3` (weak pairs), cross counts, and a word-parallel profile kernel.
//!
//! A count at `n` is only answered when every summand of `n` lies inside the
//! set's window, i.e. `n < bound`. Under-windowed queries are errors.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::intset::{BoundedSet, SetError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RepError {
    #[error("sum {n} needs summands outside the window [0, {bound})")]
    OutOfWindow { n: usize, bound: usize },
    #[error("prefix cut {x} exceeds the target sum {n}")]
    PrefixPastSum { x: usize, n: usize },
    #[error(transparent)]
    Set(#[from] SetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    R1,
    R2,
    R3,
}

fn check_window(s: &BoundedSet, n: usize) -> Result<(), RepError> {
    if n >= s.bound() {
        return Err(RepError::OutOfWindow { n, bound: s.bound() });
    }
    Ok(())
}

fn half_hit(s: &BoundedSet, n: usize) -> u64 {
    u64::from(n.is_multiple_of(2) && s.contains(n / 2))
}

/// Ordered pairs `(s, s')` with `s + s' = n`.
pub fn r1(s: &BoundedSet, n: usize) -> Result<u64, RepError> {
    check_window(s, n)?;
    Ok(2 * strict_pairs(s, n) + half_hit(s, n))
}

/// Pairs `s < s'` with `s + s' = n`.
pub fn r2(s: &BoundedSet, n: usize) -> Result<u64, RepError> {
    check_window(s, n)?;
    Ok(strict_pairs(s, n))
}

/// Pairs `s <= s'` with `s + s' = n`.
pub fn r3(s: &BoundedSet, n: usize) -> Result<u64, RepError> {
    check_window(s, n)?;
    Ok(strict_pairs(s, n) + half_hit(s, n))
}

pub fn rep(s: &BoundedSet, variant: Variant, n: usize) -> Result<u64, RepError> {
    match variant {
        Variant::R1 => r1(s, n),
        Variant::R2 => r2(s, n),
        Variant::R3 => r3(s, n),
    }
}

// Direct scan over the smaller summand. This is the reference path.
fn strict_pairs(s: &BoundedSet, n: usize) -> u64 {
    s.iter().take_while(|&a| 2 * a < n).filter(|&a| s.contains(n - a)).count() as u64
}

/// Ordered pairs `(a, b)`, `a ∈ s`, `b ∈ w`, with `a + b = n`.
pub fn r_cross(s: &BoundedSet, w: &BoundedSet, n: usize) -> Result<u64, RepError> {
    check_window(s, n)?;
    check_window(w, n)?;
    Ok(s.iter().take_while(|&a| a <= n).filter(|&a| w.contains(n - a)).count() as u64)
}

/// `R2` of the prefix `S(x)` at `n`.
pub fn r2_prefix(s: &BoundedSet, x: usize, n: usize) -> Result<u64, RepError> {
    if x > n {
        return Err(RepError::PrefixPastSum { x, n });
    }
    check_window(s, n)?;
    r2(&s.truncate(x)?, n)
}

/// Values of one representation function on `[0, n_max]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepProfile {
    pub variant: Variant,
    pub source_bound: usize,
    pub values: Vec<u64>,
}

impl RepProfile {
    pub fn n_max(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    /// First `n` in `range` where the two profiles differ.
    pub fn first_difference(&self, other: &RepProfile, range: std::ops::RangeInclusive<usize>) -> Option<usize> {
        range.into_iter().find(|&n| self.values.get(n) != other.values.get(n))
    }
}

/// Ordered self-convolution counts `#{(a, b) ∈ S², a + b = n}` for
/// `n ∈ [0, n_max]`.
///
/// For each `n` this is a popcount of `S ∧ (rev >> (n_max - n))`, where `rev`
/// is `S ∩ [0, n_max]` mirrored about `n_max`. Cost is `O(n_max² / 128)`.
pub fn ordered_profile(s: &BoundedSet, n_max: usize) -> Result<Vec<u64>, RepError> {
    check_window(s, n_max)?;
    let len = n_max + 1;
    let nwords = len.div_ceil(64);
    let mut fwd: Vec<u64> = s.words()[..nwords].to_vec();
    if !len.is_multiple_of(64) {
        fwd[nwords - 1] &= (1u64 << (len % 64)) - 1;
    }
    // One zero word of padding keeps the unaligned reads below branch-free.
    let mut rev = vec![0u64; nwords + 1];
    for e in s.iter().take_while(|&e| e <= n_max) {
        let j = n_max - e;
        rev[j / 64] |= 1 << (j % 64);
    }
    // Ordered pairs are symmetric, so only summands `a <= n / 2` are scanned:
    // ordered = 2 * #{a <= n/2} - [n/2 on the diagonal].
    let mut out = Vec::with_capacity(len);
    for n in 0..=n_max {
        let d = n_max - n;
        let (q, b) = (d / 64, d % 64);
        let half = n / 2;
        let words = half / 64 + 1;
        let tail = if half % 64 == 63 { u64::MAX } else { (1u64 << (half % 64 + 1)) - 1 };
        let mut count = 0u64;
        for i in 0..words {
            let shifted = if b == 0 { rev[i + q] } else { (rev[i + q] >> b) | (rev[i + q + 1] << (64 - b)) };
            let mut hits = fwd[i] & shifted;
            if i + 1 == words {
                hits &= tail;
            }
            count += hits.count_ones() as u64;
        }
        out.push(2 * count - half_hit(s, n));
    }
    Ok(out)
}

pub fn profile(s: &BoundedSet, variant: Variant, n_max: usize) -> Result<RepProfile, RepError> {
    let ordered = ordered_profile(s, n_max)?;
    let values = ordered
        .into_iter()
        .enumerate()
        .map(|(n, c)| {
            let diag = half_hit(s, n);
            match variant {
                Variant::R1 => c,
                Variant::R2 => (c - diag) / 2,
                Variant::R3 => (c - diag) / 2 + diag,
            }
        })
        .collect();
    Ok(RepProfile { variant, source_bound: s.bound(), values })
}

/// `R2(S, n)` for every `n <= n_max`, via the bit-parallel kernel.
pub fn r2_profile(s: &BoundedSet, n_max: usize) -> Result<RepProfile, RepError> {
    profile(s, Variant::R2, n_max)
}

/// Pointwise `R2` profile, `O(n_max²)`. Reference for the fast kernel.
pub fn r2_profile_naive(s: &BoundedSet, n_max: usize) -> Result<RepProfile, RepError> {
    check_window(s, n_max)?;
    let values = (0..=n_max).map(|n| strict_pairs(s, n)).collect();
    Ok(RepProfile { variant: Variant::R2, source_bound: s.bound(), values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{build_evil_odious, build_family, evil_odious_prefix, Family};
    use crate::intset::is_evil;

    fn set(bound: usize, xs: &[usize]) -> BoundedSet {
        BoundedSet::from_elements(bound, xs.iter().copied()).unwrap()
    }

    // Brute-force over all ordered pairs of elements.
    fn brute(s: &BoundedSet, n: usize) -> (u64, u64, u64) {
        let xs: Vec<usize> = s.iter().collect();
        let mut out = (0, 0, 0);
        for &a in &xs {
            for &b in &xs {
                if a + b == n {
                    out.0 += 1;
                    out.1 += u64::from(a < b);
                    out.2 += u64::from(a <= b);
                }
            }
        }
        out
    }

    #[test]
    fn small_examples() {
        let s = set(4, &[0, 1, 2, 3]);
        assert_eq!(r2(&s, 3), Ok(2));
        assert_eq!((r1(&s, 2), r2(&s, 2), r3(&s, 2)), (Ok(3), Ok(1), Ok(2)));
        let a = build_family(Family::S1T1(1), 14).unwrap().a;
        assert_eq!(r2(&a, 13), Ok(2));
    }

    #[test]
    fn window_is_enforced() {
        let s = set(4, &[0, 1]);
        assert_eq!(r2(&s, 4), Err(RepError::OutOfWindow { n: 4, bound: 4 }));
        assert!(r2_profile(&s, 4).is_err());
        assert!(r_cross(&s, &set(3, &[1]), 3).is_err());
    }

    #[test]
    fn r1_is_r2_plus_r3_exhaustive() {
        // Every subset of [0, 10) is a window of the bits of `mask`.
        for mask in 0u32..1 << 10 {
            let s = BoundedSet::from_predicate(10, |e| mask >> e & 1 == 1);
            for n in 0..10 {
                let (o, st, w) = brute(&s, n);
                assert_eq!((r1(&s, n).unwrap(), r2(&s, n).unwrap(), r3(&s, n).unwrap()), (o, st, w));
                assert_eq!(o, st + w);
            }
        }
    }

    #[test]
    fn cross_examples() {
        assert_eq!(r_cross(&set(3, &[0, 1]), &set(3, &[1, 2]), 2), Ok(2));
        assert_eq!(r_cross(&set(6, &[0, 1]), &BoundedSet::empty(6), 3), Ok(0));
        let (u2, v2) = evil_odious_prefix(2);
        let (u2, v2) = (u2.widen(5).unwrap(), v2.widen(5).unwrap());
        assert_eq!(r_cross(&u2, &v2, 4), Ok(1));
    }

    #[test]
    fn prefix_counts() {
        let s = set(10, &[0, 3, 5, 9]);
        assert_eq!(r2_prefix(&s, 5, 8), Ok(1));
        assert_eq!(r2_prefix(&s, 9, 9), r2(&s, 9));
        assert!(r2_prefix(&s, 9, 8).is_err());
    }

    #[test]
    fn profile_matches_pointwise_on_structured_sets() {
        let (u, _) = build_evil_odious(700);
        for n_max in [0, 1, 63, 64, 65, 127, 128, 699] {
            assert_eq!(r2_profile(&u, n_max).unwrap(), r2_profile_naive(&u, n_max).unwrap());
        }
        let empty = BoundedSet::empty(100);
        assert!(r2_profile(&empty, 99).unwrap().values.iter().all(|&v| v == 0));
    }

    #[test]
    fn all_variants_match_brute() {
        let s = BoundedSet::from_predicate(300, |n| is_evil(n) ^ (n % 7 == 3));
        for variant in [Variant::R1, Variant::R2, Variant::R3] {
            let p = profile(&s, variant, 299).unwrap();
            for n in 0..300 {
                let (o, st, w) = brute(&s, n);
                let expected = match variant {
                    Variant::R1 => o,
                    Variant::R2 => st,
                    Variant::R3 => w,
                };
                assert_eq!(p.values[n], expected);
            }
        }
    }

    #[test]
    fn kiss_sandor_prefix() {
        for l in 0..=8u32 {
            let (u, v) = evil_odious_prefix(l);
            let top = (1usize << (l + 1)) - 1;
            let (u, v) = (u.widen(top).unwrap(), v.widen(top).unwrap());
            assert_eq!(r2_profile(&u, top - 1).unwrap(), r2_profile(&v, top - 1).unwrap());
        }
    }
}
