//! Forced extension of a partition `A ∪ B = ℕ \ T` under `R_A(n) = R_B(n)`,
//! family matching, and the `(r, m)` classification grid.
//!
//! With the anchor `a0 = min(ℕ \ T)` placed in `A`, the sum `N = a0 + f` has
//! exactly one pair whose larger summand is not yet decided: `(a0, f)`. The
//! constraint at `N` therefore fixes `χ_A(f)` as `R_{B<f}(N) - R_{A<f}(N)`.
//! When that value is not 0 or 1, or is nonzero at an excluded `f`, no
//! partition exists.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::builders::{build_family, s2_offset, BuildError, Family};
use crate::intset::{progression_set, BoundedSet, ProgressionSpec, SetError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("bound {bound} is too small for {p}: need at least r + 2 = {need}")]
    BoundTooSmall { p: ProgressionSpec, bound: usize, need: usize },
    #[error("family matching needs a completed extension")]
    NotCompleted,
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Set(#[from] SetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Completed,
    Contradiction,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Completed => "Completed",
            Status::Contradiction => "Contradiction",
        })
    }
}

impl FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "Completed" => Ok(Status::Completed),
            "Contradiction" => Ok(Status::Contradiction),
            other => Err(format!("unknown status {other:?}")),
        }
    }
}

/// Where the forced extension failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contradiction {
    /// The target sum whose constraint could not be met.
    pub sum: usize,
    /// The integer whose indicator the constraint pinned down.
    pub position: usize,
    /// The value demanded for `χ_A(position)`: outside `{0, 1}`, or nonzero
    /// at an excluded position.
    pub forced_value: i64,
    pub excluded: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtensionOutcome {
    pub progression: ProgressionSpec,
    pub bound: usize,
    pub anchor: usize,
    pub status: Status,
    pub a: BoundedSet,
    pub b: BoundedSet,
    /// Everything below the frontier is decided.
    pub frontier: usize,
    pub contradiction: Option<Contradiction>,
}

impl ExtensionOutcome {
    pub fn is_completed(&self) -> bool {
        self.status == Status::Completed
    }

    /// Largest `n` whose representations are all decided.
    pub fn verified_sum_limit(&self) -> usize {
        (self.anchor + self.frontier).saturating_sub(1)
    }
}

// One side of the partition with per-sum strict pair counts.
struct Side {
    elements: Vec<usize>,
    set: BoundedSet,
    pairs: Vec<i64>,
}

impl Side {
    fn new(bound: usize, max_sum: usize) -> Self {
        Self { elements: Vec::new(), set: BoundedSet::empty(bound), pairs: vec![0; max_sum + 1] }
    }

    fn add(&mut self, x: usize) {
        let limit = self.pairs.len();
        // elements are pushed in increasing order, so sums only grow
        for &y in &self.elements {
            if x + y >= limit {
                break;
            }
            self.pairs[x + y] += 1;
        }
        self.elements.push(x);
        self.set.insert(x);
    }
}

/// Determines the unique partition prefix on `[0, bound)` (anchor in `A`),
/// or the first sum at which none can exist.
pub fn forced_extend(p: ProgressionSpec, bound: usize) -> Result<ExtensionOutcome, SolverError> {
    let need = p.r() + 2;
    if bound < need {
        return Err(SolverError::BoundTooSmall { p, bound, need });
    }
    let excluded = progression_set(p, bound);
    let anchor = p.anchor();
    let max_sum = anchor + bound - 1;
    let mut a = Side::new(bound, max_sum);
    let mut b = Side::new(bound, max_sum);
    a.add(anchor);

    let mut contradiction = None;
    let mut frontier = bound;
    for f in anchor + 1..bound {
        let sum = anchor + f;
        let demand = b.pairs[sum] - a.pairs[sum];
        let is_excluded = excluded.contains(f);
        let side = match (is_excluded, demand) {
            (true, 0) => None,
            (false, 0) => Some(&mut b),
            (false, 1) => Some(&mut a),
            _ => {
                contradiction = Some(Contradiction { sum, position: f, forced_value: demand, excluded: is_excluded });
                frontier = f;
                break;
            }
        };
        if let Some(side) = side {
            side.add(f);
        }
    }

    let status = if contradiction.is_some() { Status::Contradiction } else { Status::Completed };
    Ok(ExtensionOutcome { progression: p, bound, anchor, status, a: a.set, b: b.set, frontier, contradiction })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyMatch {
    pub family: Option<Family>,
    /// Exclusive bound of elementwise agreement; 0 when nothing matched.
    pub verified_to: usize,
}

/// Candidate families whose complement is exactly `p`, with `l <= l_max`.
pub fn families_for(p: ProgressionSpec, l_max: u32) -> Vec<Family> {
    let l_max = l_max.min(crate::builders::MAX_PARAM);
    Family::all_up_to(l_max).filter(|f| f.progression() == p).collect()
}

/// Finds the family (if any) that the completed prefix reproduces.
pub fn match_family(out: &ExtensionOutcome, p: ProgressionSpec, l_max: u32) -> Result<FamilyMatch, SolverError> {
    if !out.is_completed() {
        return Err(SolverError::NotCompleted);
    }
    for family in families_for(p, l_max) {
        let built = build_family(family, out.bound)?;
        if built.a == out.a && built.b == out.b {
            return Ok(FamilyMatch { family: Some(family), verified_to: out.bound });
        }
    }
    Ok(FamilyMatch { family: None, verified_to: 0 })
}

/// `l_max` large enough to cover every family with modulus `m`.
pub fn l_max_for(m: usize) -> u32 {
    let mut l = 0;
    while (1usize << l) + 1 < m {
        l += 1;
    }
    l
}

/// Which offsets are tried for each modulus: `0 <= r <= max_factor * m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RRule {
    pub max_factor: usize,
}

impl Default for RRule {
    fn default() -> Self {
        Self { max_factor: 2 }
    }
}

impl RRule {
    pub fn offsets(&self, m: usize) -> std::ops::RangeInclusive<usize> {
        0..=self.max_factor * m
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationRecord {
    pub r: usize,
    pub m: usize,
    pub status: Status,
    pub family: Option<Family>,
    pub contradiction_at: Option<usize>,
    pub forced_value: Option<i64>,
}

pub fn classify_cell(p: ProgressionSpec, bound: usize) -> Result<ClassificationRecord, SolverError> {
    let out = forced_extend(p, bound)?;
    let family = if out.is_completed() { match_family(&out, p, l_max_for(p.m()))?.family } else { None };
    Ok(ClassificationRecord {
        r: p.r(),
        m: p.m(),
        status: out.status,
        family,
        contradiction_at: out.contradiction.map(|c| c.sum),
        forced_value: out.contradiction.map(|c| c.forced_value),
    })
}

/// Runs every `(r, m)` cell, sorted by `r` then `m`.
pub fn classify_grid(
    m_range: std::ops::RangeInclusive<usize>,
    r_rule: RRule,
    bound: usize,
) -> Result<Vec<ClassificationRecord>, SolverError> {
    let cells: Vec<ProgressionSpec> = m_range
        .flat_map(|m| r_rule.offsets(m).map(move |r| (r, m)))
        .map(|(r, m)| ProgressionSpec::new(r, m))
        .collect::<Result<_, _>>()?;
    let mut records =
        cells.into_par_iter().map(|p| classify_cell(p, bound.max(p.r() + 2))).collect::<Result<Vec<_>, _>>()?;
    records.sort_by_key(|rec| (rec.r, rec.m));
    Ok(records)
}

/// The `(r, m)` pairs admitting a partition, restricted to `m <= m_max` and
/// `r <= max_factor * m`: `(2^l, 2^l + 1)`, `(0, 2^l + 1)`, `(ε(l), 2^l + 1)`.
pub fn predicted_completed(m_max: usize, r_rule: RRule) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    let mut l = 0u32;
    while (1usize << l) < m_max {
        let m = (1usize << l) + 1;
        for r in [1usize << l, 0, s2_offset(l)] {
            if m >= 2 && r <= r_rule.max_factor * m {
                out.insert((r, m));
            }
        }
        l += 1;
    }
    out
}

/// Flat CSV row: `r, m, status, family, l, contradiction_at, forced_value`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationRow {
    pub r: usize,
    pub m: usize,
    pub status: String,
    pub family: String,
    pub l: Option<u32>,
    pub contradiction_at: Option<usize>,
    pub forced_value: Option<i64>,
}

impl From<&ClassificationRecord> for ClassificationRow {
    fn from(rec: &ClassificationRecord) -> Self {
        Self {
            r: rec.r,
            m: rec.m,
            status: rec.status.to_string(),
            family: rec.family.map_or_else(|| "none".to_string(), |f| f.tag().to_string()),
            l: rec.family.map(|f| f.param()),
            contradiction_at: rec.contradiction_at,
            forced_value: rec.forced_value,
        }
    }
}

impl TryFrom<ClassificationRow> for ClassificationRecord {
    type Error = String;

    fn try_from(row: ClassificationRow) -> Result<Self, String> {
        let family = match (row.family.as_str(), row.l) {
            ("none", None) => None,
            (tag, Some(l)) => Some(Family::from_tag(tag, l).ok_or_else(|| format!("unknown family {tag:?}"))?),
            (tag, None) => return Err(format!("family {tag:?} without parameter")),
        };
        Ok(Self {
            r: row.r,
            m: row.m,
            status: row.status.parse()?,
            family,
            contradiction_at: row.contradiction_at,
            forced_value: row.forced_value,
        })
    }
}

pub fn write_grid_csv<W: std::io::Write>(records: &[ClassificationRecord], out: W) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for rec in records {
        writer.serialize(ClassificationRow::from(rec))?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_grid_csv<R: std::io::Read>(input: R) -> Result<Vec<ClassificationRecord>, String> {
    let mut reader = csv::Reader::from_reader(input);
    reader
        .deserialize::<ClassificationRow>()
        .map(|row| row.map_err(|e| e.to_string()).and_then(ClassificationRecord::try_from))
        .collect()
}
