//! Polynomial-time building blocks: earliest-due-date order, the
//! Moore–Hodgson rejection rule, canonical schedules under modified due
//! dates, EDD-for-a-set, and minimum maximum tardiness subject to a
//! mandatory early set.

use std::collections::BTreeSet;

use crate::sched_core::{evaluate, Instance, Job, JobId, JobTag, Schedule, Time};

/// Deterministic resolution of modified-due-date ties.
///
/// Jobs with equal modified due date are ordered by a small rank derived from
/// their structural tag, then by ascending id. The standard rule places a
/// selected star-pair job before its filler twin and, in the weak gadget, the
/// main-side job before the star-side job when their shifted due dates
/// coincide; any total order preserves optimality, these ranks pin the one the
/// golden schedules use.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TieBreakRule {
    /// Extra `(tag-rank, override)` pairs tried before the standard ranks.
    pub overrides: Vec<(JobTag, u8)>,
}

impl TieBreakRule {
    pub fn standard() -> TieBreakRule {
        TieBreakRule::default()
    }

    pub fn rank(&self, tag: &JobTag) -> u8 {
        if let Some(&(_, r)) = self.overrides.iter().find(|(t, _)| t == tag) {
            return r;
        }
        match tag {
            JobTag::NumberStar { .. } => 0,
            JobTag::WeakMain { .. } => 0,
            JobTag::WeakStar { .. } => 1,
            JobTag::FillerFirst { .. } => 2,
            JobTag::WeakFiller { .. } => 2,
            _ => 1,
        }
    }
}

/// Jobs in non-decreasing `(due, id)` order; the returned bound is the
/// minimum possible maximum tardiness over all schedules.
pub fn edd_schedule(instance: &Instance) -> (Schedule, Time) {
    let mut jobs: Vec<&Job> = instance.jobs.iter().collect();
    jobs.sort_by_key(|j| (j.due, j.id));
    let order: Vec<JobId> = jobs.iter().map(|j| j.id).collect();
    let mut clock: Time = 0;
    let mut tmax: Time = 0;
    for job in &jobs {
        clock = clock.checked_add(job.proc).expect("completion time overflows");
        tmax = tmax.max(clock - job.due);
    }
    (Schedule::new(order), tmax.max(0))
}

/// Minimum number of tardy jobs, and a schedule attaining it: accepted jobs
/// in EDD order, rejected jobs appended. When a rejection is needed, the
/// accepted job with the largest processing time is dropped (largest id on a
/// tie); any such choice preserves optimality.
pub fn moore_hodgson(instance: &Instance) -> (Schedule, usize) {
    let mut jobs: Vec<&Job> = instance.jobs.iter().collect();
    jobs.sort_by_key(|j| (j.due, j.id));
    let mut accepted: Vec<&Job> = Vec::with_capacity(jobs.len());
    let mut rejected: Vec<&Job> = Vec::new();
    let mut clock: Time = 0;
    for job in jobs {
        accepted.push(job);
        clock = clock.checked_add(job.proc).expect("completion time overflows");
        if clock > job.due {
            let worst = accepted
                .iter()
                .enumerate()
                .max_by_key(|(_, j)| (j.proc, j.id))
                .map(|(k, _)| k)
                .expect("accepted set is nonempty here");
            let dropped = accepted.remove(worst);
            clock -= dropped.proc;
            rejected.push(dropped);
        }
    }
    let mut order: Vec<JobId> = accepted.iter().map(|j| j.id).collect();
    order.extend(rejected.iter().map(|j| j.id));
    (Schedule::new(order), rejected.len())
}

/// Modified due date: unchanged for mandatory-early jobs, shifted by the
/// bound for everything else.
fn modified_due(job: &Job, early_set: &BTreeSet<JobId>, ell: Time) -> Time {
    if early_set.contains(&job.id) {
        job.due
    } else {
        job.due.checked_add(ell).expect("modified due date overflows")
    }
}

/// The schedule sorting jobs by non-decreasing modified due date, ties
/// resolved by `ties`. If any schedule keeps `early_set` early with maximum
/// tardiness at most `ell`, this one does.
pub fn canonical_schedule(
    instance: &Instance,
    early_set: &BTreeSet<JobId>,
    ell: Time,
    ties: &TieBreakRule,
) -> Schedule {
    let mut keyed: Vec<(Time, u8, JobId)> = instance
        .jobs
        .iter()
        .map(|j| (modified_due(j, early_set, ell), ties.rank(&j.tag), j.id))
        .collect();
    keyed.sort_unstable();
    Schedule::new(keyed.into_iter().map(|(_, _, id)| id).collect())
}

/// Does the canonical schedule for `early_set` at bound `ell` keep every
/// mandatory job early and stay within the bound? By the exactness of the
/// canonical construction this decides whether any such schedule exists.
pub fn canonical_feasible(
    instance: &Instance,
    early_set: &BTreeSet<JobId>,
    ell: Time,
    ties: &TieBreakRule,
) -> Option<Schedule> {
    let sched = canonical_schedule(instance, early_set, ell, ties);
    let ev = evaluate(instance, &sched).expect("canonical schedule is a permutation");
    if ev.tmax > ell {
        return None;
    }
    if early_set.iter().any(|id| ev.tardy_set.contains(id)) {
        return None;
    }
    Some(sched)
}

/// Least `ell >= 0` such that some schedule keeps `early_set` early with
/// maximum tardiness at most `ell`, together with a schedule attaining it.
/// `None` if the set cannot be scheduled early at all (no bound up to the
/// total processing time works).
pub fn min_tmax_given_early(
    instance: &Instance,
    early_set: &BTreeSet<JobId>,
) -> Option<(Time, Schedule)> {
    let ties = TieBreakRule::standard();
    // Tardiness never exceeds total processing time when due dates are >= 0.
    let mut lo: Time = 0;
    let mut hi: Time = instance.total_proc();
    if canonical_feasible(instance, early_set, hi, &ties).is_none() {
        return None;
    }
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if canonical_feasible(instance, early_set, mid, &ties).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    canonical_feasible(instance, early_set, lo, &ties).map(|s| (lo, s))
}

/// Chosen jobs first in `(due, id)` order, remaining jobs appended in id
/// order; the flag reports whether every chosen job meets its due date.
pub fn edd_for_set(instance: &Instance, chosen: &BTreeSet<JobId>) -> (Schedule, bool) {
    let mut first: Vec<&Job> = instance.jobs.iter().filter(|j| chosen.contains(&j.id)).collect();
    first.sort_by_key(|j| (j.due, j.id));
    let mut rest: Vec<&Job> = instance.jobs.iter().filter(|j| !chosen.contains(&j.id)).collect();
    rest.sort_by_key(|j| j.id);
    let mut order: Vec<JobId> = first.iter().map(|j| j.id).collect();
    order.extend(rest.iter().map(|j| j.id));
    let mut clock: Time = 0;
    let mut all_early = true;
    for job in &first {
        clock += job.proc;
        if clock > job.due {
            all_early = false;
        }
    }
    (Schedule::new(order), all_early)
}
