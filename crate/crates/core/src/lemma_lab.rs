//! Mechanical verification of the gadget structure: arithmetic identities of
//! the strong construction, predicted early/tardy status of candidate
//! schedules against direct evaluation, and exhaustive candidate sweeps that
//! decide gadget instances without touching the full schedule space.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classic::{canonical_schedule, TieBreakRule};
use crate::exact::Budget;
use crate::reductions::{
    strong_candidate_job_set, weak_candidate_job_set, weak_extract_subset, Choice, InvalidEncoding,
    StrongCandidate, StrongMeta, WeakCandidate, WeakMeta,
};
use crate::sched_core::{dec_str, evaluate, Instance, JobId, JobTag, Schedule, Time};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Prediction {
    Early,
    Tardy,
}

/// Predicted status of every job in a candidate schedule, with the rule that
/// produced each prediction so a failing comparison names the violated claim.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PredictedStatus {
    pub per_job: Vec<JobPrediction>,
    /// Whether the candidate schedule is predicted to respect the tardiness
    /// bound.
    pub predicted_feasible: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JobPrediction {
    pub id: JobId,
    pub predicted: Prediction,
    pub rule: &'static str,
}

/// Outcome of a weak-gadget prediction: the early/tardy rules only apply to
/// candidates whose unselected star elements stay within the half sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeakPrediction {
    NotApplicable {
        neg_star_sum: Time,
    },
    Predicted(PredictedStatus),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub id: JobId,
    pub predicted: Prediction,
    pub actual: Prediction,
    pub rule: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityFailure {
    pub check: &'static str,
    pub period: u32,
    #[serde(with = "dec_str")]
    pub lhs: Time,
    #[serde(with = "dec_str")]
    pub rhs: Time,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagMismatch {
    pub predicted: bool,
    pub actual: bool,
}

/// Diff between lemma-level predictions and direct evaluation. Empty means
/// full agreement.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DiscrepancyReport {
    pub mismatches: Vec<Mismatch>,
    pub identity_failures: Vec<IdentityFailure>,
    pub feasibility_mismatches: Vec<FlagMismatch>,
    pub jobs_compared: u64,
    pub flags_compared: u64,
    pub identities_checked: u64,
    pub skipped: u64,
}

impl DiscrepancyReport {
    pub fn is_empty(&self) -> bool {
        self.mismatches.is_empty() && self.identity_failures.is_empty() && self.feasibility_mismatches.is_empty()
    }

    pub fn absorb(&mut self, other: DiscrepancyReport) {
        self.mismatches.extend(other.mismatches);
        self.identity_failures.extend(other.identity_failures);
        self.feasibility_mismatches.extend(other.feasibility_mismatches);
        self.jobs_compared += other.jobs_compared;
        self.flags_compared += other.flags_compared;
        self.identities_checked += other.identities_checked;
        self.skipped += other.skipped;
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SweepError {
    #[error("candidate space of size {required} exceeds the budget of {budget}")]
    BudgetExceeded { required: u128, budget: u64 },
}

// ---------------------------------------------------------------------------
// Strong gadget: arithmetic identities
// ---------------------------------------------------------------------------

/// Is the job's due date within the first `j` periods' star span? The span
/// covers both filler families of the front, all pair jobs up to the first
/// half of period `j`, and the delimiters strictly before it.
fn in_star_span(tag: &JobTag, j: u32) -> bool {
    match *tag {
        JobTag::FillerZero | JobTag::FillerFirst { .. } => true,
        JobTag::NumberStar { j: tj, .. } | JobTag::NegNumberStar { j: tj, .. } => tj <= j,
        JobTag::Number { j: tj, .. } | JobTag::NegNumber { j: tj, .. } => tj + 1 <= j,
        JobTag::DelimiterStar { j: tj } => tj <= j,
        JobTag::Delimiter { j: tj } => tj + 1 <= j,
        _ => false,
    }
}

/// Same span extended to the end of period `j`.
fn in_main_span(tag: &JobTag, j: u32) -> bool {
    match *tag {
        JobTag::FillerZero | JobTag::FillerFirst { .. } => true,
        JobTag::NumberStar { j: tj, .. } | JobTag::NegNumberStar { j: tj, .. } => tj <= j,
        JobTag::Number { j: tj, .. } | JobTag::NegNumber { j: tj, .. } => tj <= j,
        JobTag::DelimiterStar { j: tj } => tj <= j,
        JobTag::Delimiter { j: tj } => tj <= j,
        _ => false,
    }
}

/// Checks, for every period, the two due-window inequalities and the two
/// stated forms of both prefix-load identities by direct summation over the
/// constructed jobs. Exact integer comparison throughout.
pub fn check_strong_identities(instance: &Instance, meta: &StrongMeta) -> DiscrepancyReport {
    fn check_eq(report: &mut DiscrepancyReport, name: &'static str, j: u32, lhs: Time, rhs: Time) {
        report.identities_checked += 1;
        if lhs != rhs {
            report.identity_failures.push(IdentityFailure { check: name, period: j, lhs, rhs });
        }
    }

    let mut report = DiscrepancyReport::default();
    let (n, t) = (meta.n as Time, meta.group_sum);
    let (sq, cube) = (meta.scale * meta.scale, meta.scale * meta.scale * meta.scale);

    for j in 1..=meta.m {
        let jt = j as Time;
        let star_load: Time =
            instance.jobs.iter().filter(|job| in_star_span(&job.tag, j)).map(|job| job.proc).sum();
        let main_prev_load: Time =
            instance.jobs.iter().filter(|job| in_main_span(&job.tag, j - 1)).map(|job| job.proc).sum();

        check_eq(
            &mut report,
            "star_prefix_load_period_form",
            j,
            star_load,
            meta.period_end[j as usize] - (n * cube + sq + 2 * jt * t * meta.scale),
        );
        check_eq(
            &mut report,
            "star_prefix_load_half_form",
            j,
            star_load,
            meta.half_point[(j - 1) as usize] + n * cube + jt * t,
        );
        check_eq(
            &mut report,
            "main_prefix_load_half_form",
            j,
            main_prev_load,
            meta.half_point[(j - 1) as usize]
                - (n * cube + sq + (meta.m as Time - jt) * t * meta.scale + (meta.m as Time - jt) * t),
        );
        check_eq(
            &mut report,
            "main_prefix_load_period_form",
            j,
            main_prev_load,
            meta.period_end[(j - 1) as usize] + n * cube + (meta.m as Time - jt + 1) * t * meta.scale,
        );

        // Strict due windows: everything in the span except its own delimiter
        // must fit before the boundary even when maximally tardy.
        let star_window = instance
            .jobs
            .iter()
            .filter(|job| in_star_span(&job.tag, j) && job.tag != JobTag::DelimiterStar { j })
            .map(|job| job.due + meta.bound)
            .max()
            .expect("span is nonempty");
        report.identities_checked += 1;
        if star_window >= meta.period_end[j as usize] {
            report.identity_failures.push(IdentityFailure {
                check: "first_half_due_window",
                period: j,
                lhs: star_window,
                rhs: meta.period_end[j as usize],
            });
        }
        let main_window = instance
            .jobs
            .iter()
            .filter(|job| in_main_span(&job.tag, j) && job.tag != JobTag::Delimiter { j })
            .map(|job| job.due + meta.bound)
            .max()
            .expect("span is nonempty");
        report.identities_checked += 1;
        if main_window >= meta.half_point_at(j + 1) {
            report.identity_failures.push(IdentityFailure {
                check: "second_half_due_window",
                period: j,
                lhs: main_window,
                rhs: meta.half_point_at(j + 1),
            });
        }
    }
    report
}

// ---------------------------------------------------------------------------
// Strong gadget: candidate predictions
// ---------------------------------------------------------------------------

/// No pair may carry its selection backwards: a selected main job must be
/// followed by a selected star job in the next period, and a selected star
/// job must be accompanied by the selected main job of its own period.
pub fn strong_predicted_feasible(candidate: &StrongCandidate) -> bool {
    let (n, m) = (candidate.n(), candidate.m());
    for i in 1..=n {
        for j in 1..=m {
            if candidate.star_at(i, j).is_pos() && !candidate.main_at(i, j).is_pos() {
                return false;
            }
            if j < m && candidate.main_at(i, j).is_pos() && !candidate.star_at(i, j + 1).is_pos() {
                return false;
            }
        }
    }
    true
}

/// Early/tardy prediction for the canonical schedule of a strong candidate
/// set: fillers early, number jobs early iff selected, the half delimiter
/// early iff the selected star elements reach `j * t`, the period delimiter
/// early iff the selected main elements stay within `j * t`.
pub fn predict_strong(meta: &StrongMeta, candidate: &StrongCandidate) -> PredictedStatus {
    let mut per_job = Vec::with_capacity(meta.job_index.len());
    for &(tag, id) in &meta.job_index {
        let (predicted, rule) = match tag {
            JobTag::FillerZero | JobTag::FillerFirst { .. } | JobTag::FillerLast { .. } => {
                (Prediction::Early, "filler-always-early")
            }
            JobTag::NumberStar { i, j } => match candidate.star_at(i, j) {
                Choice::Pos => (Prediction::Early, "selected-number-early"),
                Choice::Neg => (Prediction::Tardy, "unselected-number-tardy"),
            },
            JobTag::NegNumberStar { i, j } => match candidate.star_at(i, j) {
                Choice::Neg => (Prediction::Early, "selected-number-early"),
                Choice::Pos => (Prediction::Tardy, "unselected-number-tardy"),
            },
            JobTag::Number { i, j } => match candidate.main_at(i, j) {
                Choice::Pos => (Prediction::Early, "selected-number-early"),
                Choice::Neg => (Prediction::Tardy, "unselected-number-tardy"),
            },
            JobTag::NegNumber { i, j } => match candidate.main_at(i, j) {
                Choice::Neg => (Prediction::Early, "selected-number-early"),
                Choice::Pos => (Prediction::Tardy, "unselected-number-tardy"),
            },
            JobTag::DelimiterStar { j } => {
                if candidate.star_sum(meta, j) >= j as Time * meta.group_sum {
                    (Prediction::Early, "half-delimiter-quota-met")
                } else {
                    (Prediction::Tardy, "half-delimiter-quota-missed")
                }
            }
            JobTag::Delimiter { j } => {
                if candidate.main_sum(meta, j) <= j as Time * meta.group_sum {
                    (Prediction::Early, "period-delimiter-within-quota")
                } else {
                    (Prediction::Tardy, "period-delimiter-over-quota")
                }
            }
            other => panic!("foreign tag {other:?} in a strong gadget"),
        };
        per_job.push(JobPrediction { id, predicted, rule });
    }
    PredictedStatus { per_job, predicted_feasible: strong_predicted_feasible(candidate) }
}

/// Canonical schedule of a strong candidate set under the standard ties.
pub fn strong_canonical(instance: &Instance, meta: &StrongMeta, candidate: &StrongCandidate) -> Schedule {
    let early = strong_candidate_job_set(meta, candidate);
    canonical_schedule(instance, &early, meta.bound, &TieBreakRule::standard())
}

fn compare_prediction(
    instance: &Instance,
    schedule: &Schedule,
    bound: Time,
    prediction: &PredictedStatus,
) -> DiscrepancyReport {
    let mut report = DiscrepancyReport::default();
    let ev = evaluate(instance, schedule).expect("candidate schedule is a permutation");
    let actual_feasible = ev.tmax <= bound;
    report.flags_compared = 1;
    if actual_feasible != prediction.predicted_feasible {
        report
            .feasibility_mismatches
            .push(FlagMismatch { predicted: prediction.predicted_feasible, actual: actual_feasible });
    }
    // The early/tardy rules describe candidate schedules that meet the bound;
    // for the rest only the feasibility flag is claimed.
    if prediction.predicted_feasible {
        for jp in &prediction.per_job {
            report.jobs_compared += 1;
            let actual = if ev.tardy_set.contains(&jp.id) { Prediction::Tardy } else { Prediction::Early };
            if actual != jp.predicted {
                report.mismatches.push(Mismatch { id: jp.id, predicted: jp.predicted, actual, rule: jp.rule });
            }
        }
    }
    report
}

/// Prediction versus direct evaluation of the canonical candidate schedule.
pub fn compare_strong(instance: &Instance, meta: &StrongMeta, candidate: &StrongCandidate) -> DiscrepancyReport {
    let prediction = predict_strong(meta, candidate);
    let schedule = strong_canonical(instance, meta, candidate);
    compare_prediction(instance, &schedule, meta.bound, &prediction)
}

// ---------------------------------------------------------------------------
// Weak gadget: candidate predictions
// ---------------------------------------------------------------------------

/// Early/tardy prediction for the canonical schedule of a weak candidate
/// set. Not applicable when the unselected star elements exceed the half sum
/// (such sets are no candidate sets in the strict sense).
pub fn predict_weak(meta: &WeakMeta, candidate: &WeakCandidate) -> WeakPrediction {
    let neg_star_sum = candidate.neg_star_sum(meta);
    if neg_star_sum > meta.half_sum {
        return WeakPrediction::NotApplicable { neg_star_sum };
    }
    let mut per_job = Vec::with_capacity(meta.job_index.len());
    for &(tag, id) in &meta.job_index {
        let (predicted, rule) = match tag {
            JobTag::WeakFiller { .. } => (Prediction::Early, "filler-always-early"),
            JobTag::WeakStar { i } => match candidate.star_at(i) {
                Choice::Pos => (Prediction::Early, "selected-star-side-early"),
                Choice::Neg => (Prediction::Tardy, "unselected-star-side-tardy"),
            },
            JobTag::WeakNegStar { i } => match candidate.star_at(i) {
                Choice::Neg => (Prediction::Early, "selected-star-side-early"),
                Choice::Pos => (Prediction::Tardy, "unselected-star-side-tardy"),
            },
            JobTag::WeakMain { i } => {
                if !candidate.main_at(i).is_pos() {
                    (Prediction::Tardy, "unselected-main-side-tardy")
                } else if candidate.star_at(i).is_pos()
                    && candidate.main_prefix_sum(meta, i) > meta.half_sum
                {
                    (Prediction::Tardy, "main-prefix-sum-overflow")
                } else {
                    (Prediction::Early, "selected-main-early")
                }
            }
            JobTag::WeakNegMain { i } => {
                if candidate.main_at(i).is_pos() {
                    (Prediction::Tardy, "unselected-main-side-tardy")
                } else if candidate.star_at(i).is_pos() {
                    (Prediction::Tardy, "negative-main-after-selected-star")
                } else if candidate.main_prefix_sum(meta, i) > meta.half_sum {
                    (Prediction::Tardy, "main-prefix-sum-overflow")
                } else {
                    (Prediction::Early, "selected-main-early")
                }
            }
            other => panic!("foreign tag {other:?} in a weak gadget"),
        };
        per_job.push(JobPrediction { id, predicted, rule });
    }
    // The bound holds iff the last star pair selects positive or the selected
    // main elements stay within the half sum.
    let feasible = candidate.star_at(meta.n).is_pos() || candidate.main_sum(meta) <= meta.half_sum;
    WeakPrediction::Predicted(PredictedStatus { per_job, predicted_feasible: feasible })
}

/// Canonical schedule of a weak candidate set under the standard ties.
pub fn weak_canonical(instance: &Instance, meta: &WeakMeta, candidate: &WeakCandidate) -> Schedule {
    let early = weak_candidate_job_set(meta, candidate);
    canonical_schedule(instance, &early, meta.bound, &TieBreakRule::standard())
}

/// Prediction versus direct evaluation; not-applicable candidates are
/// counted as skipped and contribute nothing.
pub fn compare_weak(instance: &Instance, meta: &WeakMeta, candidate: &WeakCandidate) -> DiscrepancyReport {
    match predict_weak(meta, candidate) {
        WeakPrediction::NotApplicable { .. } => DiscrepancyReport { skipped: 1, ..DiscrepancyReport::default() },
        WeakPrediction::Predicted(prediction) => {
            let schedule = weak_canonical(instance, meta, candidate);
            compare_prediction(instance, &schedule, meta.bound, &prediction)
        }
    }
}

// ---------------------------------------------------------------------------
// Candidate enumeration and sweeps
// ---------------------------------------------------------------------------

/// All candidate sets without a backwards selection, generated directly as
/// per-element monotone switch patterns: in the flattened selection sequence
/// (star 1, main 1, star 2, main 2, ...) each element turns positive at one
/// of the `2m + 1` cut points and stays positive. Exactly the sets whose
/// canonical schedule can meet the bound.
pub fn enumerate_strong_patterns(n: u32, m: u32) -> impl Iterator<Item = StrongCandidate> {
    let cuts = 2 * m as usize + 1;
    let total = (cuts as u128).checked_pow(n).expect("pattern space fits in u128");
    (0..total).map(move |mut code| {
        let mut cand = StrongCandidate::all(n, m, Choice::Neg);
        for i in 0..n as usize {
            let switch = (code % cuts as u128) as usize; // leading negatives
            code /= cuts as u128;
            for j in 0..m as usize {
                if 2 * j + 1 > switch {
                    cand.star[i][j] = Choice::Pos;
                }
                if 2 * (j + 1) > switch {
                    cand.main[i][j] = Choice::Pos;
                }
            }
        }
        cand
    })
}

/// Exhaustive enumeration of every strong candidate set (all `2^(2nm)` choice
/// combinations); only sensible at tiny sizes.
pub fn enumerate_strong_candidates(n: u32, m: u32) -> impl Iterator<Item = StrongCandidate> {
    let bits = 2 * n * m;
    assert!(bits <= 24, "full strong enumeration is for tiny gadgets");
    (0u64..(1 << bits)).map(move |mask| {
        let mut cand = StrongCandidate::all(n, m, Choice::Neg);
        let mut bit = 0;
        for i in 0..n as usize {
            for j in 0..m as usize {
                if mask >> bit & 1 == 1 {
                    cand.star[i][j] = Choice::Pos;
                }
                if mask >> (bit + 1) & 1 == 1 {
                    cand.main[i][j] = Choice::Pos;
                }
                bit += 2;
            }
        }
        cand
    })
}

/// All `2^(2n)` weak choice vectors.
pub fn enumerate_weak_candidates(n: u32) -> impl Iterator<Item = WeakCandidate> {
    assert!(n <= 15, "full weak enumeration is for small gadgets");
    (0u64..(1 << (2 * n))).map(move |mask| {
        let mut cand = WeakCandidate::all(n, Choice::Neg);
        for i in 0..n as usize {
            if mask >> (2 * i) & 1 == 1 {
                cand.star[i] = Choice::Pos;
            }
            if mask >> (2 * i + 1) & 1 == 1 {
                cand.main[i] = Choice::Pos;
            }
        }
        cand
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrongSweep {
    pub explored: u64,
    /// Minimum tardy count over the feasible candidate schedules.
    pub best_tardy: Option<u64>,
    /// A candidate attaining the minimum, present iff it meets the target.
    pub witness: Option<StrongCandidate>,
}

/// Evaluates the canonical schedule of every monotone candidate set and
/// reports the minimum tardy count among those meeting the bound, with a
/// witness when the gadget target is reached.
pub fn sweep_strong(instance: &Instance, meta: &StrongMeta, budget: &Budget) -> Result<StrongSweep, SweepError> {
    let required = (2 * meta.m as u128 + 1).checked_pow(meta.n).expect("pattern space fits in u128");
    if required > budget.max_candidates as u128 {
        return Err(SweepError::BudgetExceeded { required, budget: budget.max_candidates });
    }
    let mut explored = 0u64;
    let mut best: Option<(u64, StrongCandidate)> = None;
    for cand in enumerate_strong_patterns(meta.n, meta.m) {
        explored += 1;
        let sched = strong_canonical(instance, meta, &cand);
        let ev = evaluate(instance, &sched).expect("canonical schedule is a permutation");
        if ev.tmax > meta.bound {
            continue;
        }
        let tardy = ev.num_tardy as u64;
        if best.as_ref().map_or(true, |(b, _)| tardy < *b) {
            best = Some((tardy, cand));
        }
    }
    let best_tardy = best.as_ref().map(|(b, _)| *b);
    let witness = best.filter(|(b, _)| *b as Time <= meta.tardy_target).map(|(_, c)| c);
    Ok(StrongSweep { explored, best_tardy, witness })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakSweep {
    pub explored: u64,
    /// Whether some candidate schedule attains the reference tardy count
    /// within the bound.
    pub achievable: bool,
    pub witness: Option<WeakCandidate>,
    /// Subset extracted from the witness.
    pub witness_subset: Option<BTreeSet<u32>>,
    pub extraction_error: Option<InvalidEncoding>,
}

/// Evaluates the canonical schedule of every weak choice vector and reports
/// whether the reference tardy count is attainable within the bound; the
/// first achieving candidate is extracted back to a subset.
pub fn sweep_weak(instance: &Instance, meta: &WeakMeta, budget: &Budget) -> Result<WeakSweep, SweepError> {
    let required = 1u128.checked_shl(2 * meta.n).expect("choice space fits in u128");
    if required > budget.max_candidates as u128 {
        return Err(SweepError::BudgetExceeded { required, budget: budget.max_candidates });
    }
    let mut explored = 0u64;
    for cand in enumerate_weak_candidates(meta.n) {
        explored += 1;
        let sched = weak_canonical(instance, meta, &cand);
        let ev = evaluate(instance, &sched).expect("canonical schedule is a permutation");
        if ev.tmax <= meta.bound && (ev.num_tardy as Time) <= meta.tardy_target {
            let (witness_subset, extraction_error) = match weak_extract_subset(meta, &cand) {
                Ok(s) => (Some(s), None),
                Err(e) => (None, Some(e)),
            };
            return Ok(WeakSweep { explored, achievable: true, witness: Some(cand), witness_subset, extraction_error });
        }
    }
    Ok(WeakSweep { explored, achievable: false, witness: None, witness_subset: None, extraction_error: None })
}

// ---------------------------------------------------------------------------
// Random candidates
// ---------------------------------------------------------------------------

fn coin<R: Rng>(rng: &mut R) -> Choice {
    if rng.gen_bool(0.5) {
        Choice::Pos
    } else {
        Choice::Neg
    }
}

/// Uniformly random strong candidate (usually infeasible).
pub fn random_strong_candidate<R: Rng>(n: u32, m: u32, rng: &mut R) -> StrongCandidate {
    let mut cand = StrongCandidate::all(n, m, Choice::Neg);
    for i in 0..n as usize {
        for j in 0..m as usize {
            cand.star[i][j] = coin(rng);
            cand.main[i][j] = coin(rng);
        }
    }
    cand
}

/// Uniformly random monotone candidate; always feasible by construction.
pub fn random_monotone_strong_candidate<R: Rng>(n: u32, m: u32, rng: &mut R) -> StrongCandidate {
    let mut cand = StrongCandidate::all(n, m, Choice::Neg);
    for i in 0..n as usize {
        let switch = rng.gen_range(0..=2 * m as usize);
        for j in 0..m as usize {
            if 2 * j + 1 > switch {
                cand.star[i][j] = Choice::Pos;
            }
            if 2 * (j + 1) > switch {
                cand.main[i][j] = Choice::Pos;
            }
        }
    }
    cand
}

/// Uniformly random weak candidate (may be outside the prediction's scope).
pub fn random_weak_candidate<R: Rng>(n: u32, rng: &mut R) -> WeakCandidate {
    WeakCandidate {
        star: (0..n).map(|_| coin(rng)).collect(),
        main: (0..n).map(|_| coin(rng)).collect(),
    }
}

/// Random weak candidate whose unselected star elements stay within the half
/// sum, so the early/tardy prediction applies.
pub fn random_applicable_weak_candidate<R: Rng>(meta: &WeakMeta, rng: &mut R) -> WeakCandidate {
    for _ in 0..10_000 {
        let cand = random_weak_candidate(meta.n, rng);
        if cand.neg_star_sum(meta) <= meta.half_sum {
            return cand;
        }
    }
    // All-positive stars always qualify.
    WeakCandidate {
        star: vec![Choice::Pos; meta.n as usize],
        main: (0..meta.n).map(|_| coin(rng)).collect(),
    }
}
