//! Exact checkers for the identity lemmas behind the classification, and a
//! suite that instantiates each of them on the built families.
//!
//! Every check is an integer equality. Checkers validate their hypotheses
//! first; an instance that fails its hypotheses is rejected, never counted as
//! a counterexample.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::builders::{
    build_ef, build_evil_odious, build_family, build_parity_sets, build_xy, evil_odious_prefix, BuildError, Family,
    WeightSequence,
};
use crate::intset::{is_evil, progression_set, BoundedSet, ProgressionSpec, SetError};
use crate::repfn::{r2, r2_prefix, r2_profile, r2_profile_naive, r_cross, RepError};
use crate::solver::{classify_grid, forced_extend, predicted_completed, RRule, SolverError, Status};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("instance rejected: {0}")]
    Hypothesis(String),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Set(#[from] SetError),
}

fn reject(msg: impl Into<String>) -> VerifyError {
    VerifyError::Hypothesis(msg.into())
}

/// Both sides of an identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityEval {
    pub lhs: i64,
    pub rhs: i64,
}

impl IdentityEval {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

// ---------------------------------------------------------------------------
// Four-term identity for truncated sets.

/// Sets and cut points shared by a battery of four-term identity instances.
///
/// All sets are re-windowed to `[0, k]` after the hypotheses are checked on
/// their common original window; nothing in the identity looks past `k`.
#[derive(Debug, Clone)]
pub struct Lem2nSetup {
    a: BoundedSet,
    b: BoundedSet,
    c: BoundedSet,
    d: BoundedSet,
    t: BoundedSet,
    l: usize,
    k: usize,
    label: String,
}

/// One `(n, N)` evaluation point with `L <= n <= N <= K`.
#[derive(Debug, Clone, Copy)]
pub struct Lem2nInstance<'a> {
    pub setup: &'a Lem2nSetup,
    pub n: usize,
    pub sum: usize,
}

impl Lem2nSetup {
    /// Validates the hypotheses: `L ∈ T`, `L ∉ C`, `0 ∈ A ∩ C`, `0 ∉ B ∪ D`,
    /// `A ∪ B = ℕ \ T` and `A ∩ B = ∅` on the common window,
    /// `C(K) ∪ D(K) = [0, K] \ T(L-1)`, `C(K) ∩ D(K) = ∅`,
    /// `A(L-1) = C(L-1)` and `B(L-1) = D(L-1)`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a: &BoundedSet,
        b: &BoundedSet,
        c: &BoundedSet,
        d: &BoundedSet,
        t: &BoundedSet,
        l: usize,
        k: usize,
        label: impl Into<String>,
    ) -> Result<Self, VerifyError> {
        if l == 0 || l > k || k > 2 * l {
            return Err(reject(format!("need 1 <= L <= K <= 2L, got L={l}, K={k}")));
        }
        let window = [a, b, c, d, t].iter().map(|s| s.bound()).min().unwrap_or(0);
        if window <= k {
            return Err(reject(format!("sets are windowed to {window}, need more than K={k}")));
        }
        let cut = |s: &BoundedSet| s.rebound(window).0;
        let (wa, wb, wc, wd, wt) = (cut(a), cut(b), cut(c), cut(d), cut(t));
        if !wt.contains(l) {
            return Err(reject(format!("L={l} is not in T")));
        }
        if wc.contains(l) {
            return Err(reject(format!("L={l} is in C")));
        }
        if !(wa.contains(0) && wc.contains(0)) || wb.contains(0) || wd.contains(0) {
            return Err(reject("need 0 in A and C, 0 outside B and D"));
        }
        if !wa.is_disjoint(&wb)? || wa.union(&wb)? != wt.complement() {
            return Err(reject("A, B do not partition the complement of T"));
        }
        let (ck, dk, tk) = (wc.truncate(k)?, wd.truncate(k)?, wt.truncate(l - 1)?);
        if !ck.is_disjoint(&dk)? || ck.union(&dk)? != BoundedSet::full(k + 1).rebound(window).0.difference(&tk)? {
            return Err(reject("C(K), D(K) do not partition [0, K] minus T(L-1)"));
        }
        if wa.truncate(l - 1)? != wc.truncate(l - 1)? || wb.truncate(l - 1)? != wd.truncate(l - 1)? {
            return Err(reject("A, B disagree with C, D below L"));
        }
        let keep = |s: &BoundedSet| s.rebound(k + 1).0;
        Ok(Self { a: keep(&wa), b: keep(&wb), c: keep(&wc), d: keep(&wd), t: keep(&wt), l, k, label: label.into() })
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn d(&self) -> &BoundedSet {
        &self.d
    }

    /// Every `(n, N)` with `L <= n <= N <= K`.
    pub fn instances(&self) -> impl Iterator<Item = Lem2nInstance<'_>> {
        (self.l..=self.k).flat_map(move |n| (n..=self.k).map(move |sum| Lem2nInstance { setup: self, n, sum }))
    }

    /// Toggles membership of `x` in `D` without re-checking hypotheses.
    ///
    /// The result generally violates the `C(K) ∪ D(K)` partition, so the
    /// identity is no longer a theorem for it. Only meant for probing that
    /// the evaluator reacts to its inputs.
    pub fn with_d_flipped_unchecked(&self, x: usize) -> Self {
        let mut out = self.clone();
        if out.d.contains(x) {
            out.d.remove(x);
        } else {
            out.d.insert(x);
        }
        out.label = format!("{} with {x} flipped in D", self.label);
        out
    }
}

impl Lem2nInstance<'_> {
    /// `R_{A(n)}(N) + R_{D(n)}(N) - R_{B(n)}(N) - R_{C(n)}(N)` against
    /// `|D'| - R_{T,D'}(N) + R_{D,T(L,n)∩D}(N) - |C'| + R_{T,C'}(N) - R_{C,T(L,n)∩C}(N) - ε`
    /// with `D' = D(n) \ (B(n) ∪ T(L,n))`, `C' = C(n) \ (A(n) ∪ T(L,n))`,
    /// `ε = [N = 2L]`.
    pub fn evaluate(&self) -> Result<IdentityEval, VerifyError> {
        let s = self.setup;
        let (n, sum) = (self.n, self.sum);
        if n < s.l || sum < n || sum > s.k {
            return Err(reject(format!("need L <= n <= N <= K, got n={n}, N={sum}")));
        }
        let count = |x: u64| x as i64;
        let lhs = count(r2_prefix(&s.a, n, sum)?) + count(r2_prefix(&s.d, n, sum)?)
            - count(r2_prefix(&s.b, n, sum)?)
            - count(r2_prefix(&s.c, n, sum)?);

        let (an, bn, cn, dn) = (s.a.truncate(n)?, s.b.truncate(n)?, s.c.truncate(n)?, s.d.truncate(n)?);
        let t_window = s.t.truncate(n)?.difference(&s.t.truncate(s.l - 1)?)?;
        let d_only = dn.difference(&bn.union(&t_window)?)?;
        let c_only = cn.difference(&an.union(&t_window)?)?;
        let eps = i64::from(sum == 2 * s.l);
        let rhs = d_only.len() as i64 - count(r_cross(&s.t, &d_only, sum)?)
            + count(r_cross(&s.d, &t_window.intersection(&s.d)?, sum)?)
            - c_only.len() as i64
            + count(r_cross(&s.t, &c_only, sum)?)
            - count(r_cross(&s.c, &t_window.intersection(&s.c)?, sum)?)
            - eps;
        Ok(IdentityEval { lhs, rhs })
    }
}

/// Validates nothing beyond the setup; evaluates and compares both sides.
pub fn check_lem2n(inst: &Lem2nInstance<'_>) -> Result<bool, VerifyError> {
    Ok(inst.evaluate()?.holds())
}

// ---------------------------------------------------------------------------
// Thue–Morse sum identity below 2 min T.

/// Outcome of the evil-number identity for one completed partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lem3Report {
    pub min_t: usize,
    /// `min T ∉ U` (equivalently `min T ∈ V`).
    pub min_t_odious: bool,
    /// `(n, eval)` for every `1 <= n < 2 min T`.
    pub evaluations: Vec<(usize, IdentityEval)>,
}

impl Lem3Report {
    pub fn holds(&self) -> bool {
        self.min_t_odious && self.evaluations.iter().all(|(_, e)| e.holds())
    }

    pub fn first_failure(&self) -> Option<(usize, IdentityEval)> {
        self.evaluations.iter().copied().find(|(_, e)| !e.holds())
    }
}

/// `Σ_{t∈T(n)} χ_U(n-t+1)` against
/// `Σ_{t∈T(n)} χ_U(n-t) + χ_A(n+1) - χ_U(n+1) - ε`, `ε = [n = 2L - 1]`,
/// `L = min T`.
pub fn lem3_identity(a: &BoundedSet, p: ProgressionSpec, n: usize) -> Result<IdentityEval, VerifyError> {
    let l = p.r();
    let u = |x: usize| i64::from(is_evil(x));
    let ts = (0..).map(|k| p.r() + k * p.m()).take_while(|&t| t <= n);
    let (lhs, shifted): (i64, i64) = ts.fold((0, 0), |(lhs, rhs), t| (lhs + u(n - t + 1), rhs + u(n - t)));
    let eps = i64::from(n + 1 == 2 * l);
    let rhs = shifted + i64::from(a.chi(n + 1)?) - u(n + 1) - eps;
    Ok(IdentityEval { lhs, rhs })
}

/// Evaluates the identity on an explicit `A`, with no feasibility check.
pub fn evaluate_lem3_with(a: &BoundedSet, p: ProgressionSpec) -> Result<Lem3Report, VerifyError> {
    let l = p.r();
    if l == 0 {
        return Err(reject("min T must be positive"));
    }
    if a.bound() <= 2 * l {
        return Err(reject(format!("window {} too small, need more than 2 min T = {}", a.bound(), 2 * l)));
    }
    let evaluations = (1..2 * l).map(|n| lem3_identity(a, p, n).map(|e| (n, e))).collect::<Result<_, _>>()?;
    Ok(Lem3Report { min_t: l, min_t_odious: !is_evil(l), evaluations })
}

/// Solves `(r, m)` and evaluates the identity on the resulting `A`.
pub fn evaluate_lem3(p: ProgressionSpec, bound: usize) -> Result<Lem3Report, VerifyError> {
    let out = forced_extend(p, bound)?;
    if !out.is_completed() {
        return Err(reject(format!("{p} has no partition (contradiction at {:?})", out.contradiction)));
    }
    evaluate_lem3_with(&out.a, p)
}

pub fn check_lem3(p: ProgressionSpec, bound: usize) -> Result<bool, VerifyError> {
    Ok(evaluate_lem3(p, bound)?.holds())
}

// ---------------------------------------------------------------------------
// Representation-profile comparisons.

/// First `n` in `[n_min, n_max]` where `R2(first, n) != R2(second, n)`.
pub fn first_r2_mismatch(
    first: &BoundedSet,
    second: &BoundedSet,
    n_min: usize,
    n_max: usize,
) -> Result<Option<(usize, IdentityEval)>, VerifyError> {
    let pa = r2_profile(first, n_max)?;
    let pb = r2_profile(second, n_max)?;
    Ok(pa
        .first_difference(&pb, n_min..=n_max)
        .map(|n| (n, IdentityEval { lhs: pa.values[n] as i64, rhs: pb.values[n] as i64 })))
}

// ---------------------------------------------------------------------------
// Suite.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundProfile {
    Quick,
    Full,
}

impl FromStr for BoundProfile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "quick" => Ok(BoundProfile::Quick),
            "full" => Ok(BoundProfile::Full),
            other => Err(format!("unknown bound profile {other:?} (expected quick or full)")),
        }
    }
}

/// Sizes used by each check.
#[derive(Debug, Clone, Copy)]
pub struct ProfileParams {
    pub family_bound: usize,
    pub family_l_max: u32,
    pub kiss_l_max: u32,
    pub ef_u_max: u32,
    pub lem2n_l_max: u32,
    pub grid_m_max: usize,
    pub grid_bound: usize,
    pub kernel_sets: usize,
    pub kernel_n: usize,
}

impl BoundProfile {
    pub fn params(self) -> ProfileParams {
        match self {
            BoundProfile::Quick => ProfileParams {
                family_bound: 1 << 10,
                family_l_max: 6,
                kiss_l_max: 8,
                ef_u_max: 6,
                lem2n_l_max: 4,
                grid_m_max: 9,
                grid_bound: 1024,
                kernel_sets: 20,
                kernel_n: 512,
            },
            BoundProfile::Full => ProfileParams {
                family_bound: 1 << 14,
                family_l_max: 6,
                kiss_l_max: 10,
                ef_u_max: 8,
                lem2n_l_max: 6,
                grid_m_max: 33,
                grid_bound: 2048,
                kernel_sets: 100,
                kernel_n: 2048,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LemmaId {
    /// `U_l`/`V_l` have equal profiles.
    Lemma2,
    /// Four-term identity for truncated sets, plus mutation sensitivity.
    Lemma3,
    /// Thue–Morse sum identity, plus mutation sensitivity.
    Lemma5,
    /// `H0`/`H1` have equal profiles and never collide.
    Lemma6,
    /// `E_u`/`F_u` partition their window and have equal profiles.
    Lemma7,
    /// `X`/`Y` partition `ℕ \ {1}` and have equal profiles.
    Lemma8,
    /// Family complements are the predicted progressions.
    Lemma12,
    /// `r ∉ U`, `r + 1 ∈ U` on every completed cell with `r >= 2`.
    Lemma13i,
    /// Completed grid cells are exactly the predicted ones.
    Theorem1,
    /// Fast profile kernel agrees with the pointwise count.
    Kernel,
}

impl LemmaId {
    pub const ALL: [LemmaId; 10] = [
        LemmaId::Lemma2,
        LemmaId::Lemma3,
        LemmaId::Lemma5,
        LemmaId::Lemma6,
        LemmaId::Lemma7,
        LemmaId::Lemma8,
        LemmaId::Lemma12,
        LemmaId::Lemma13i,
        LemmaId::Theorem1,
        LemmaId::Kernel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LemmaId::Lemma2 => "lemma2",
            LemmaId::Lemma3 => "lemma3",
            LemmaId::Lemma5 => "lemma5",
            LemmaId::Lemma6 => "lemma6",
            LemmaId::Lemma7 => "lemma7",
            LemmaId::Lemma8 => "lemma8",
            LemmaId::Lemma12 => "lemma12",
            LemmaId::Lemma13i => "lemma13i",
            LemmaId::Theorem1 => "theorem1",
            LemmaId::Kernel => "kernel",
        }
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LemmaId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        LemmaId::ALL.into_iter().find(|id| id.name() == s).ok_or_else(|| format!("unknown lemma id {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub inputs: String,
    pub lhs: i64,
    pub rhs: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma: LemmaId,
    pub instance_count: usize,
    pub pass_count: usize,
    /// Generated instances dropped because their hypotheses did not hold.
    pub rejected_count: usize,
    pub first_failure: Option<Failure>,
}

impl LemmaReport {
    fn new(lemma: LemmaId) -> Self {
        Self { lemma, instance_count: 0, pass_count: 0, rejected_count: 0, first_failure: None }
    }

    pub fn passed(&self) -> bool {
        self.first_failure.is_none() && self.pass_count == self.instance_count
    }

    fn record(&mut self, ok: bool, failure: impl FnOnce() -> Failure) {
        self.instance_count += 1;
        if ok {
            self.pass_count += 1;
        } else if self.first_failure.is_none() {
            self.first_failure = Some(failure());
        }
    }

    fn record_eval(&mut self, eval: IdentityEval, inputs: impl FnOnce() -> String) {
        self.record(eval.holds(), || Failure { inputs: inputs(), lhs: eval.lhs, rhs: eval.rhs });
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub profile: BoundProfile,
    pub seed: u64,
    pub lemmas: Vec<LemmaReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.lemmas.iter().all(LemmaReport::passed)
    }
}

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

/// Runs the selected checks (all when `only` is empty), in canonical order.
pub fn run_suite(profile: BoundProfile, seed: u64, only: &[LemmaId]) -> Result<SuiteReport, VerifyError> {
    let params = profile.params();
    let ids: Vec<LemmaId> = if only.is_empty() { LemmaId::ALL.to_vec() } else { only.to_vec() };
    let mut lemmas = ids.into_par_iter().map(|id| run_one(id, &params, seed)).collect::<Result<Vec<_>, _>>()?;
    lemmas.sort_by_key(|r| r.lemma);
    lemmas.dedup_by_key(|r| r.lemma);
    Ok(SuiteReport { profile, seed, lemmas })
}

pub fn run_one(id: LemmaId, params: &ProfileParams, seed: u64) -> Result<LemmaReport, VerifyError> {
    match id {
        LemmaId::Lemma2 => check_kiss_sandor(params.kiss_l_max),
        LemmaId::Lemma3 => check_four_term_battery(params.lem2n_l_max),
        LemmaId::Lemma5 => check_thue_morse_battery(params.family_l_max),
        LemmaId::Lemma6 => check_parity_weights(params.family_l_max, params.family_bound),
        LemmaId::Lemma7 => check_ef(params.ef_u_max),
        LemmaId::Lemma8 => check_xy(params.family_bound),
        LemmaId::Lemma12 => check_family_complements(params.family_l_max, params.family_bound),
        LemmaId::Lemma13i => check_small_offset_digits(params.grid_m_max, params.grid_bound),
        LemmaId::Theorem1 => check_grid(params.grid_m_max, params.grid_bound),
        LemmaId::Kernel => check_kernel(params.kernel_sets, params.kernel_n, seed),
    }
}

/// `U_l` and `V_l` (windowed wide enough for every sum) on `n <= 2^(l+1) - 2`.
pub fn kiss_sandor_mismatch(
    u: &BoundedSet,
    v: &BoundedSet,
    l: u32,
) -> Result<Option<(usize, IdentityEval)>, VerifyError> {
    let top = (1usize << (l + 1)) - 2;
    first_r2_mismatch(&u.widen(top + 1)?, &v.widen(top + 1)?, 0, top)
}

pub fn check_kiss_sandor(l_max: u32) -> Result<LemmaReport, VerifyError> {
    let mut report = LemmaReport::new(LemmaId::Lemma2);
    for l in 0..=l_max {
        let (u, v) = evil_odious_prefix(l);
        let mismatch = kiss_sandor_mismatch(&u, &v, l)?;
        report.record(mismatch.is_none(), || {
            let (n, e) = mismatch.unwrap();
            Failure { inputs: format!("l={l}, n={n}"), lhs: e.lhs, rhs: e.rhs }
        });
    }
    Ok(report)
}

/// The standard four-term instantiations: `(C, D) = (U, V)` with
/// `L = min T`, `K = 2L`; `(C, D) = (E_u, F_u)` with `min T = 2^u`,
/// `L = r + m`; `(C, D) = (X, Y)` with `r = 1`, `L = 1 + m`, `K = 2L`.
pub fn four_term_setups(l_max: u32) -> Result<(Vec<Lem2nSetup>, usize), VerifyError> {
    let mut setups = Vec::new();
    let mut rejected = 0;
    let mut push = |res: Result<Lem2nSetup, VerifyError>| match res {
        Ok(s) => {
            setups.push(s);
            Ok(())
        }
        Err(VerifyError::Hypothesis(_)) => {
            rejected += 1;
            Ok(())
        }
        Err(e) => Err(e),
    };
    for family in Family::all_up_to(l_max) {
        let p = family.progression();
        if p.r() == 0 {
            continue;
        }
        let (r, m) = (p.r(), p.m());
        let window = 2 * (r + m) + 2;
        let built = build_family(family, window)?;
        let (a, b, t) = (&built.a, &built.b, &built.excluded);

        let (u, v) = build_evil_odious(window);
        push(Lem2nSetup::new(a, b, &u, &v, t, r, 2 * r, format!("{family} with (U, V)")))?;

        if r.is_power_of_two() {
            let uexp = r.trailing_zeros();
            let (e, f) = build_ef(uexp)?;
            let l = r + m;
            let k = (2 * l).min(e.bound() - 1);
            push(Lem2nSetup::new(a, b, &e, &f, t, l, k, format!("{family} with (E_{uexp}, F_{uexp})")))?;
        }
        if r == 1 {
            let (x, y) = build_xy(window)?;
            let l = 1 + m;
            push(Lem2nSetup::new(a, b, &x, &y, t, l, 2 * l, format!("{family} with (X, Y)")))?;
        }
    }
    Ok((setups, rejected))
}

/// Looks for an element of `D` above `L` whose removal makes the identity
/// fail somewhere. Returns `(x, n, N)`.
pub fn four_term_mutation_detected(setup: &Lem2nSetup) -> Result<Option<(usize, usize, usize)>, VerifyError> {
    let candidates: Vec<usize> = setup.d().iter().filter(|&x| x > setup.l() && x <= setup.k()).collect();
    for x in candidates {
        let mutated = setup.with_d_flipped_unchecked(x);
        for inst in mutated.instances() {
            if !check_lem2n(&inst)? {
                return Ok(Some((x, inst.n, inst.sum)));
            }
        }
    }
    Ok(None)
}

pub fn check_four_term_battery(l_max: u32) -> Result<LemmaReport, VerifyError> {
    let mut report = LemmaReport::new(LemmaId::Lemma3);
    let (setups, rejected) = four_term_setups(l_max)?;
    report.rejected_count = rejected;
    let mut saw_eps = false;
    for setup in &setups {
        for inst in setup.instances() {
            saw_eps |= inst.sum == 2 * setup.l();
            let eval = inst.evaluate()?;
            report.record_eval(eval, || format!("{}, L={}, n={}, N={}", setup.label(), setup.l(), inst.n, inst.sum));
        }
    }
    report.record(saw_eps, || Failure { inputs: "no instance reached N = 2L".into(), lhs: 0, rhs: 1 });
    let sensitive = setups.iter().find_map(|s| four_term_mutation_detected(s).transpose()).transpose()?;
    report.record(sensitive.is_some(), || Failure {
        inputs: "no single-element flip of D changed any verdict".into(),
        lhs: 0,
        rhs: 1,
    });
    Ok(report)
}

pub fn check_thue_morse_battery(l_max: u32) -> Result<LemmaReport, VerifyError> {
    let mut report = LemmaReport::new(LemmaId::Lemma5);
    let mut saw_eps = false;
    let mut sensitive = false;
    for family in Family::all_up_to(l_max) {
        let p = family.progression();
        if p.r() == 0 {
            continue;
        }
        let bound = 2 * p.r() + 2;
        let res = evaluate_lem3(p, bound)?;
        report.record(res.min_t_odious, || Failure {
            inputs: format!("{p}: min T={} is evil", res.min_t),
            lhs: 0,
            rhs: 1,
        });
        for (n, eval) in &res.evaluations {
            saw_eps |= n + 1 == 2 * p.r();
            report.record_eval(*eval, || format!("{p}, n={n}"));
        }
        if !sensitive {
            let a = forced_extend(p, bound)?.a;
            for x in 2..=2 * p.r() {
                let mut mutated = a.clone();
                if mutated.contains(x) {
                    mutated.remove(x);
                } else {
                    mutated.insert(x);
                }
                if !evaluate_lem3_with(&mutated, p)?.holds() {
                    sensitive = true;
                    break;
                }
            }
        }
    }
    report.record(saw_eps, || Failure { inputs: "no instance reached n = 2L - 1".into(), lhs: 0, rhs: 1 });
    report.record(sensitive, || Failure {
        inputs: "no single-element flip of A changed the verdict".into(),
        lhs: 0,
        rhs: 1,
    });
    Ok(report)
}

pub fn check_parity_weights(l_max: u32, bound: usize) -> Result<LemmaReport, VerifyError> {
    let mut report = LemmaReport::new(LemmaId::Lemma6);
    let mut sequences = vec![WeightSequence::xy()];
    for l in 0..=l_max {
        sequences.push(WeightSequence::s1(l)?);
        sequences.push(WeightSequence::s2(l)?);
    }
    for w in &sequences {
        let built = build_parity_sets(w, bound);
        report.record(built.ambiguous.is_empty(), || Failure {
            inputs: format!("{:?}: value {:?} has both parities", w.kind(), built.ambiguous.min()),
            lhs: 1,
            rhs: 0,
        });
        let mismatch = first_r2_mismatch(&built.even_set, &built.odd_set, 1, bound - 1)?;
        report.record(mismatch.is_none(), || {
            let (n, e) = mismatch.unwrap();
            Failure { inputs: format!("{:?}, n={n}", w.kind()), lhs: e.lhs, rhs: e.rhs }
        });
    }
    Ok(report)
}

pub fn check_ef(u_max: u32) -> Result<LemmaReport, VerifyError> {
    let mut report = LemmaReport::new(LemmaId::Lemma7);
    for u in 0..=u_max {
        let (e, f) = build_ef(u)?;
        let top = e.bound() - 1;
        let mut expected = BoundedSet::full(top + 1);
        expected.remove(1 << u);
        let partition = e.is_disjoint(&f)? && e.union(&f)? == expected && e.contains(0);
        report.record(partition, || Failure {
            inputs: format!("u={u}: E, F do not partition the window"),
            lhs: 0,
            rhs: 1,
        });
        let mismatch = first_r2_mismatch(&e, &f, 1, top)?;
        report.record(mismatch.is_none(), || {
            let (n, ev) = mismatch.unwrap();
            Failure { inputs: format!("u={u}, n={n}"), lhs: ev.lhs, rhs: ev.rhs }
        });
    }
    Ok(report)
}

pub fn check_xy(bound: usize) -> Result<LemmaReport, VerifyError> {
    let mut report = LemmaReport::new(LemmaId::Lemma8);
    let (x, y) = build_xy(bound)?;
    let mut expected = BoundedSet::full(bound);
    expected.remove(1);
    report.record(x.is_disjoint(&y)? && x.union(&y)? == expected, || Failure {
        inputs: "X, Y do not partition the window minus {1}".into(),
        lhs: 0,
        rhs: 1,
    });
    let mismatch = first_r2_mismatch(&x, &y, 1, bound - 1)?;
    report.record(mismatch.is_none(), || {
        let (n, e) = mismatch.unwrap();
        Failure { inputs: format!("n={n}"), lhs: e.lhs, rhs: e.rhs }
    });
    Ok(report)
}

/// Complements, disjointness and equal profiles for every family. For the
/// shifted family both the shifted and the unshifted pair are compared.
pub fn check_family_complements(l_max: u32, bound: usize) -> Result<LemmaReport, VerifyError> {
    let mut report = LemmaReport::new(LemmaId::Lemma12);
    for family in Family::all_up_to(l_max) {
        let built = build_family(family, bound)?;
        let covered = built.a.union(&built.b)?;
        let expected = progression_set(family.progression(), bound);
        let ok = built.a.is_disjoint(&built.b)? && covered.complement() == expected;
        report.record(ok, || {
            let n = (0..bound).find(|&n| covered.contains(n) == expected.contains(n)).unwrap_or(0);
            Failure {
                inputs: format!("{family}: membership of {n}"),
                lhs: i64::from(covered.contains(n)),
                rhs: i64::from(!expected.contains(n)),
            }
        });
        let anchor = family.progression().anchor();
        let mismatch = first_r2_mismatch(&built.a, &built.b, 1, bound - anchor - 1)?;
        report.record(mismatch.is_none(), || {
            let (n, e) = mismatch.unwrap();
            Failure { inputs: format!("{family}, n={n}"), lhs: e.lhs, rhs: e.rhs }
        });
        if let Family::S1T1Shifted(l) = family {
            let unshifted = build_family(Family::S1T1(l), bound)?;
            let mismatch = first_r2_mismatch(&unshifted.a, &unshifted.b, 1, bound - 1)?;
            report.record(mismatch.is_none(), || {
                let (n, e) = mismatch.unwrap();
                Failure { inputs: format!("{family} read unshifted, n={n}"), lhs: e.lhs, rhs: e.rhs }
            });
        }
    }
    Ok(report)
}

pub fn check_small_offset_digits(m_max: usize, bound: usize) -> Result<LemmaReport, VerifyError> {
    let mut report = LemmaReport::new(LemmaId::Lemma13i);
    let cells = predicted_completed(m_max, RRule::default());
    for &(r, m) in cells.iter().filter(|(r, _)| *r >= 2) {
        let out = forced_extend(ProgressionSpec::new(r, m)?, bound)?;
        if !out.is_completed() {
            report.rejected_count += 1;
            continue;
        }
        report.record(!is_evil(r) && is_evil(r + 1), || Failure {
            inputs: format!("r={r}, m={m}: [r in U, r+1 in U]"),
            lhs: i64::from(is_evil(r)) * 2 + i64::from(is_evil(r + 1)),
            rhs: 1,
        });
    }
    Ok(report)
}

pub fn check_grid(m_max: usize, bound: usize) -> Result<LemmaReport, VerifyError> {
    let mut report = LemmaReport::new(LemmaId::Theorem1);
    let rule = RRule::default();
    let predicted = predicted_completed(m_max, rule);
    for rec in classify_grid(2..=m_max, rule, bound)? {
        let completed = rec.status == Status::Completed;
        let expected = predicted.contains(&(rec.r, rec.m));
        let consistent = completed == expected && completed == rec.family.is_some();
        report.record(consistent, || Failure {
            inputs: format!("r={}, m={}, status={}, family={:?}", rec.r, rec.m, rec.status, rec.family),
            lhs: i64::from(completed),
            rhs: i64::from(expected),
        });
    }
    Ok(report)
}

pub fn random_set(rng: &mut impl Rng, bound: usize) -> BoundedSet {
    let density: f64 = rng.gen_range(0.05..0.95);
    BoundedSet::from_predicate(bound, |_| rng.gen_bool(density))
}

pub fn check_kernel(sets: usize, n_max: usize, seed: u64) -> Result<LemmaReport, VerifyError> {
    let mut report = LemmaReport::new(LemmaId::Kernel);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..sets {
        let s = random_set(&mut rng, n_max + 1);
        let fast = r2_profile(&s, n_max)?;
        let slow = r2_profile_naive(&s, n_max)?;
        report.record(fast == slow, || {
            let n = fast.first_difference(&slow, 0..=n_max).unwrap_or(0);
            Failure {
                inputs: format!("random set #{i}, n={n}"),
                lhs: fast.values[n] as i64,
                rhs: slow.values[n] as i64,
            }
        });
    }
    Ok(report)
}

/// Pointwise `R2` equality on `[1, n_max]`; used by tests that want the
/// scalar path instead of the profile kernel.
pub fn pointwise_equal(a: &BoundedSet, b: &BoundedSet, n_max: usize) -> Result<bool, VerifyError> {
    for n in 1..=n_max {
        if r2(a, n)? != r2(b, n)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(r: usize, m: usize) -> ProgressionSpec {
        ProgressionSpec::new(r, m).unwrap()
    }

    fn uv_setup(family: Family) -> Lem2nSetup {
        let p = family.progression();
        let window = 4 * p.r() + 4;
        let built = build_family(family, window).unwrap();
        let (u, v) = build_evil_odious(window);
        Lem2nSetup::new(&built.a, &built.b, &u, &v, &built.excluded, p.r(), 2 * p.r(), "test").unwrap()
    }

    #[test]
    fn four_term_holds_with_ef() {
        let built = build_family(Family::S1T1(2), 64).unwrap();
        let (e, f) = build_ef(2).unwrap();
        let setup = Lem2nSetup::new(&built.a, &built.b, &e, &f, &built.excluded, 9, 13, "s1t1:2 / E_2").unwrap();
        let mut count = 0;
        for inst in setup.instances() {
            assert!(check_lem2n(&inst).unwrap(), "n={} N={}", inst.n, inst.sum);
            count += 1;
        }
        assert_eq!(count, 15);
    }

    #[test]
    fn four_term_eps_branch() {
        let setup = uv_setup(Family::S1T1(2));
        let l = setup.l();
        for n in l..=2 * l {
            let inst = Lem2nInstance { setup: &setup, n, sum: 2 * l };
            assert!(check_lem2n(&inst).unwrap());
        }
    }

    #[test]
    fn four_term_detects_mutation() {
        let setup = uv_setup(Family::S1T1(3));
        assert!(four_term_mutation_detected(&setup).unwrap().is_some());
    }

    #[test]
    fn four_term_rejects_bad_hypotheses() {
        let built = build_family(Family::S1T1(2), 64).unwrap();
        let (u, v) = build_evil_odious(64);
        // L = 5 is not in T = {4, 9, ...}.
        let err = Lem2nSetup::new(&built.a, &built.b, &u, &v, &built.excluded, 5, 8, "x").unwrap_err();
        assert!(matches!(err, VerifyError::Hypothesis(_)));
        // Removing an element of D below K breaks the C/D partition.
        let mut d = v.clone();
        d.remove(7);
        let err = Lem2nSetup::new(&built.a, &built.b, &u, &d, &built.excluded, 4, 8, "x").unwrap_err();
        assert!(matches!(err, VerifyError::Hypothesis(_)));
        // K beyond 2L.
        assert!(Lem2nSetup::new(&built.a, &built.b, &u, &v, &built.excluded, 4, 9, "x").is_err());
    }

    #[test]
    fn thue_morse_identity_examples() {
        let rep = evaluate_lem3(spec(2, 3), 14).unwrap();
        assert!(rep.min_t_odious);
        assert_eq!(rep.evaluations.len(), 3);
        assert!(rep.holds());
        let rep = evaluate_lem3(spec(4, 5), 20).unwrap();
        assert!(rep.holds());
        assert_eq!(rep.evaluations.last().unwrap().0, 7);
        let rep = evaluate_lem3(spec(1, 2), 8).unwrap();
        assert_eq!(rep.evaluations.len(), 1);
        assert!(rep.holds());
    }

    #[test]
    fn thue_morse_rejections() {
        assert!(matches!(evaluate_lem3(spec(1, 4), 64), Err(VerifyError::Hypothesis(_))));
        assert!(matches!(evaluate_lem3(spec(0, 3), 64), Err(VerifyError::Hypothesis(_))));
    }

    #[test]
    fn kiss_sandor_off_by_one_is_caught() {
        let l = 3;
        let (u, _) = evil_odious_prefix(l);
        // V ∩ [0, 2^l] instead of V ∩ [0, 2^l - 1].
        let (_, v_wide) = build_evil_odious((1 << l) + 1);
        let u = u.widen((1 << l) + 1).unwrap();
        let (n, eval) = kiss_sandor_mismatch(&u, &v_wide, l).unwrap().unwrap();
        assert_eq!(n, 9);
        assert_eq!(eval, IdentityEval { lhs: 1, rhs: 2 });
        let (u, v) = evil_odious_prefix(l);
        assert_eq!(kiss_sandor_mismatch(&u, &v, l).unwrap(), None);
    }

    #[test]
    fn lemma_ids_parse() {
        for id in LemmaId::ALL {
            assert_eq!(id.name().parse::<LemmaId>().unwrap(), id);
        }
        assert!("lemma99".parse::<LemmaId>().is_err());
    }

    #[test]
    fn quick_suite_passes() {
        let report = run_suite(BoundProfile::Quick, DEFAULT_SEED, &[]).unwrap();
        for l in &report.lemmas {
            assert!(l.passed(), "{l:?}");
            assert!(l.instance_count > 0, "{l:?}");
        }
        assert_eq!(report.lemmas.len(), LemmaId::ALL.len());
    }
}
