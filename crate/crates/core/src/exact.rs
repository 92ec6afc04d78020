//! Exact solvers for the four bicriteria variants at desk scale, plus the
//! permutation brute-force oracle used to certify them.
//!
//! The primary engine enumerates early sets and tests each with a canonical
//! schedule instead of walking all permutations: a set can be kept early
//! within a tardiness bound iff its canonical schedule does it, which raises
//! the reachable size from roughly 9 jobs to roughly 22.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::classic::{canonical_feasible, edd_for_set, edd_schedule, min_tmax_given_early, moore_hodgson, TieBreakRule};
use crate::sched_core::{dec_str, evaluate, Instance, JobId, Schedule, Time};

/// Enumeration caps. `explored` in results counts what was actually visited;
/// enumeration aborts with `BudgetExceeded` as soon as a cap is crossed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_subsets: u64,
    pub max_perms: u64,
    pub max_candidates: u64,
}

impl Default for Budget {
    fn default() -> Budget {
        Budget {
            max_subsets: 1 << 22,
            max_perms: 362_880, // 9!
            max_candidates: 2_000_000,
        }
    }
}

/// Objective selector for the brute-force oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ObjectiveSpec {
    Constraint {
        #[serde(with = "dec_str")]
        ell: Time,
    },
    LexTmaxThenU,
    LexUThenTmax,
    WeightedSum {
        #[serde(with = "dec_str")]
        w1: Time,
        #[serde(with = "dec_str")]
        w2: Time,
    },
}

/// A solved optimum: the schedule, its exact criteria values, the
/// variant-dependent objective, and the enumeration effort.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptimalResult {
    pub schedule: Schedule,
    #[serde(with = "dec_str")]
    pub tmax: Time,
    pub num_tardy: usize,
    #[serde(with = "dec_str")]
    pub objective: Time,
    pub explored: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum OptResult {
    Optimal(OptimalResult),
    Infeasible { explored: u64 },
    BudgetExceeded { explored: u64 },
}

impl OptResult {
    pub fn optimal(&self) -> Option<&OptimalResult> {
        match self {
            OptResult::Optimal(r) => Some(r),
            _ => None,
        }
    }

    pub fn expect_optimal(&self, what: &str) -> &OptimalResult {
        self.optimal().unwrap_or_else(|| panic!("{what}: expected an optimal result, got {self:?}"))
    }
}

fn optimal_from_schedule(instance: &Instance, schedule: Schedule, objective: Time, explored: u64) -> OptResult {
    let ev = evaluate(instance, &schedule).expect("solver produced a permutation");
    OptResult::Optimal(OptimalResult {
        schedule,
        tmax: ev.tmax,
        num_tardy: ev.num_tardy,
        objective,
        explored,
    })
}

/// Iterator over all index subsets of `{0..n}` with exactly `size` elements,
/// in lexicographic order of the sorted index list.
fn combinations(n: usize, size: usize) -> impl Iterator<Item = Vec<usize>> {
    itertools::Itertools::combinations(0..n, size)
}

/// Binomial coefficient, saturating at `cap` to keep the arithmetic cheap.
fn binomial_capped(n: u64, k: u64, cap: u128) -> u128 {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
        if acc > cap {
            return cap + 1;
        }
    }
    acc
}

fn ids_for(instance: &Instance, idxs: &[usize]) -> BTreeSet<JobId> {
    idxs.iter().map(|&k| instance.jobs[k].id).collect()
}

/// Minimum number of tardy jobs subject to `tmax <= ell`.
///
/// Enumerates early sets by descending cardinality and stops at the first
/// cardinality containing a set whose canonical schedule keeps it early
/// within the bound; that schedule realizes the optimum exactly. Infeasible
/// iff even the empty set fails, i.e. iff `ell` is below the EDD bound.
pub fn solve_constraint(instance: &Instance, ell: Time, budget: &Budget) -> OptResult {
    let ties = TieBreakRule::standard();
    let n = instance.len();
    let mut explored: u64 = 0;
    for size in (0..=n).rev() {
        for idxs in combinations(n, size) {
            explored += 1;
            if explored > budget.max_subsets {
                return OptResult::BudgetExceeded { explored: explored - 1 };
            }
            let early = ids_for(instance, &idxs);
            if let Some(sched) = canonical_feasible(instance, &early, ell, &ties) {
                let result = optimal_from_schedule(instance, sched, (n - size) as Time, explored);
                if let OptResult::Optimal(ref r) = result {
                    debug_assert_eq!(r.num_tardy, n - size);
                }
                return result;
            }
        }
    }
    OptResult::Infeasible { explored }
}

/// True iff some schedule has `tmax <= ell` and at most `k` tardy jobs.
/// Stops as soon as the answer is decided in either direction.
pub fn decision_constraint(instance: &Instance, ell: Time, k: Time, budget: &Budget) -> Result<bool, OptResult> {
    let ties = TieBreakRule::standard();
    let n = instance.len();
    let floor = if k < 0 {
        return Ok(false);
    } else if (k as u128) >= n as u128 {
        0
    } else {
        n - k as usize
    };
    let mut explored: u64 = 0;
    for size in (floor..=n).rev() {
        for idxs in combinations(n, size) {
            explored += 1;
            if explored > budget.max_subsets {
                return Err(OptResult::BudgetExceeded { explored: explored - 1 });
            }
            let early = ids_for(instance, &idxs);
            if canonical_feasible(instance, &early, ell, &ties).is_some() {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Lexicographic optimum with maximum tardiness as the primary criterion:
/// the bound is pinned to the EDD optimum and the tardy count minimized
/// under it.
pub fn solve_lex_tmax_then_u(instance: &Instance, budget: &Budget) -> OptResult {
    let (_, ell_star) = edd_schedule(instance);
    match solve_constraint(instance, ell_star, budget) {
        OptResult::Optimal(r) => {
            // Every schedule has tmax >= the EDD bound, so the realized value
            // must equal it.
            debug_assert_eq!(r.tmax, ell_star);
            OptResult::Optimal(OptimalResult { objective: r.num_tardy as Time, ..r })
        }
        other => other,
    }
}

/// Lexicographic optimum with the tardy count as the primary criterion: the
/// count is pinned to the Moore–Hodgson optimum `k*`, then the maximum
/// tardiness is minimized over all early sets of size `n - k*` that can be
/// scheduled early.
pub fn solve_lex_u_then_tmax(instance: &Instance, budget: &Budget) -> OptResult {
    let (_, k_star) = moore_hodgson(instance);
    let n = instance.len();
    // The whole size class is scanned, so the cost is known upfront.
    if binomial_capped(n as u64, k_star as u64, budget.max_subsets as u128) > budget.max_subsets as u128 {
        return OptResult::BudgetExceeded { explored: 0 };
    }
    let mut explored: u64 = 0;
    let mut best: Option<(Time, Schedule)> = None;
    // Enumerate the tardy side, which is the smaller one when few jobs miss.
    for tardy_idxs in combinations(n, k_star) {
        explored += 1;
        if explored > budget.max_subsets {
            return OptResult::BudgetExceeded { explored: explored - 1 };
        }
        let chosen: BTreeSet<JobId> = instance
            .jobs
            .iter()
            .enumerate()
            .filter(|(k, _)| !tardy_idxs.contains(k))
            .map(|(_, j)| j.id)
            .collect();
        let (_, all_early) = edd_for_set(instance, &chosen);
        if !all_early {
            continue;
        }
        if let Some((ell, sched)) = min_tmax_given_early(instance, &chosen) {
            if best.as_ref().map_or(true, |(b, _)| ell < *b) {
                best = Some((ell, sched));
            }
        }
    }
    let (ell, sched) = best.expect("the Moore-Hodgson early set is always schedulable");
    let result = optimal_from_schedule(instance, sched, ell, explored);
    if let OptResult::Optimal(ref r) = result {
        debug_assert_eq!(r.num_tardy, k_star);
        debug_assert_eq!(r.tmax, ell);
    }
    result
}

/// Minimum of `w1 * tmax + w2 * num_tardy`. Every early set is probed with
/// its least feasible bound and scored by the realized evaluation of the
/// resulting schedule; incidental extra early jobs only improve the score,
/// and minimizing over all sets still covers every schedule's exact early
/// set.
pub fn solve_weighted_sum(instance: &Instance, w1: Time, w2: Time, budget: &Budget) -> OptResult {
    let n = instance.len();
    // Every subset is scanned, so the cost is known upfront.
    if n >= 64 || (1u128 << n) > budget.max_subsets as u128 {
        return OptResult::BudgetExceeded { explored: 0 };
    }
    let mut explored: u64 = 0;
    let mut best: Option<(Time, Schedule)> = None;
    for size in 0..=n {
        for idxs in combinations(n, size) {
            explored += 1;
            if explored > budget.max_subsets {
                return OptResult::BudgetExceeded { explored: explored - 1 };
            }
            let early = ids_for(instance, &idxs);
            if let Some((_, sched)) = min_tmax_given_early(instance, &early) {
                let ev = evaluate(instance, &sched).expect("canonical schedule is a permutation");
                let score = w1
                    .checked_mul(ev.tmax)
                    .and_then(|a| a.checked_add(w2.checked_mul(ev.num_tardy as Time)?))
                    .expect("weighted objective overflows");
                if best.as_ref().map_or(true, |(b, _)| score < *b) {
                    best = Some((score, sched));
                }
            }
        }
    }
    let (score, sched) = best.expect("the empty early set is always schedulable");
    optimal_from_schedule(instance, sched, score, explored)
}

/// Exhaustive permutation oracle for any of the four variants. Independent of
/// the early-set engine: completion times are accumulated directly per
/// permutation.
pub fn brute_force_permutations(instance: &Instance, objective: &ObjectiveSpec, budget: &Budget) -> OptResult {
    let n = instance.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut explored: u64 = 0;
    // Scored as (primary, secondary) pairs so one loop serves all variants.
    let mut best: Option<((Time, Time), Vec<usize>)> = None;
    let mut feasible_seen = false;

    loop {
        explored += 1;
        if explored > budget.max_perms {
            return OptResult::BudgetExceeded { explored: explored - 1 };
        }
        let mut clock: Time = 0;
        let mut tmax: Time = 0;
        let mut tardy: Time = 0;
        for &idx in &perm {
            let job = &instance.jobs[idx];
            clock += job.proc;
            if clock > job.due {
                tardy += 1;
                tmax = tmax.max(clock - job.due);
            }
        }
        let key = match objective {
            ObjectiveSpec::Constraint { ell } => {
                if tmax <= *ell {
                    feasible_seen = true;
                    Some((tardy, 0))
                } else {
                    None
                }
            }
            ObjectiveSpec::LexTmaxThenU => Some((tmax, tardy)),
            ObjectiveSpec::LexUThenTmax => Some((tardy, tmax)),
            ObjectiveSpec::WeightedSum { w1, w2 } => Some((w1 * tmax + w2 * tardy, 0)),
        };
        if let Some(key) = key {
            if best.as_ref().map_or(true, |(b, _)| key < *b) {
                best = Some((key, perm.clone()));
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }

    match best {
        None => {
            debug_assert!(!feasible_seen);
            OptResult::Infeasible { explored }
        }
        Some(((primary, _), perm)) => {
            let order: Vec<JobId> = perm.iter().map(|&k| instance.jobs[k].id).collect();
            let objective_value = match objective {
                ObjectiveSpec::Constraint { .. } => primary,
                ObjectiveSpec::LexTmaxThenU => {
                    let ev = evaluate(instance, &Schedule::new(order.clone())).unwrap();
                    ev.num_tardy as Time
                }
                ObjectiveSpec::LexUThenTmax => {
                    let ev = evaluate(instance, &Schedule::new(order.clone())).unwrap();
                    ev.tmax
                }
                ObjectiveSpec::WeightedSum { .. } => primary,
            };
            optimal_from_schedule(instance, Schedule::new(order), objective_value, explored)
        }
    }
}

/// Next lexicographic permutation in place; false once the last one is done.
fn next_permutation(perm: &mut [usize]) -> bool {
    if perm.len() < 2 {
        return false;
    }
    let mut i = perm.len() - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = perm.len() - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sched_core::{Job, Variant};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn plain_instance(jobs: &[(Time, Time)]) -> Instance {
        let jobs = jobs
            .iter()
            .enumerate()
            .map(|(k, &(p, d))| Job::new(k as JobId, p, d))
            .collect();
        Instance::new(jobs, Variant::None)
    }

    fn random_instance(rng: &mut ChaCha8Rng, max_n: usize) -> Instance {
        let n = rng.gen_range(1..=max_n);
        let jobs = (0..n).map(|_| (rng.gen_range(0..=20), rng.gen_range(0..=20))).collect::<Vec<_>>();
        plain_instance(&jobs)
    }

    #[test]
    fn brute_single_job() {
        let inst = plain_instance(&[(3, 1)]);
        let r = brute_force_permutations(&inst, &ObjectiveSpec::LexTmaxThenU, &Budget::default());
        let r = r.expect_optimal("single job");
        assert_eq!(r.schedule.order, vec![0]);
        assert_eq!(r.tmax, 2);
        assert_eq!(r.explored, 1);
    }

    #[test]
    fn brute_lex_u_then_tmax_three_jobs() {
        // All six orders enumerated by hand: the tardy minimum is 1 and the
        // best bound among 1-tardy orders is 3.
        let inst = plain_instance(&[(2, 2), (3, 4), (2, 5)]);
        let r = brute_force_permutations(&inst, &ObjectiveSpec::LexUThenTmax, &Budget::default());
        let r = r.expect_optimal("three jobs");
        assert_eq!(r.num_tardy, 1);
        assert_eq!(r.tmax, 3);
        assert_eq!(r.explored, 6);
    }

    #[test]
    fn brute_budget() {
        let inst = random_instance(&mut ChaCha8Rng::seed_from_u64(1), 6);
        let tight = Budget { max_perms: 2, ..Budget::default() };
        if inst.len() > 2 {
            assert!(matches!(
                brute_force_permutations(&inst, &ObjectiveSpec::LexTmaxThenU, &tight),
                OptResult::BudgetExceeded { explored: 2 }
            ));
        }
    }

    #[test]
    fn constraint_trivial_cases() {
        // Everything fits early when the horizon is loose.
        let inst = plain_instance(&[(1, 10), (2, 10), (3, 10)]);
        let r = solve_constraint(&inst, 0, &Budget::default());
        assert_eq!(r.expect_optimal("loose dues").num_tardy, 0);

        // Below the EDD bound nothing is feasible.
        let inst = plain_instance(&[(5, 0)]);
        assert!(matches!(solve_constraint(&inst, 4, &Budget::default()), OptResult::Infeasible { .. }));
        assert_eq!(solve_constraint(&inst, 5, &Budget::default()).expect_optimal("at bound").num_tardy, 1);
    }

    #[test]
    fn constraint_with_total_proc_bound_equals_moore() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..30 {
            let inst = random_instance(&mut rng, 7);
            let ell = inst.total_proc();
            let r = solve_constraint(&inst, ell, &Budget::default());
            assert_eq!(r.expect_optimal("vacuous bound").num_tardy, moore_hodgson(&inst).1);
        }
    }

    #[test]
    fn all_solvers_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let budget = Budget::default();
        for _ in 0..25 {
            let inst = random_instance(&mut rng, 6);
            let total = inst.total_proc();

            for ell in [0, total / 3, total] {
                let got = solve_constraint(&inst, ell, &budget);
                let want = brute_force_permutations(&inst, &ObjectiveSpec::Constraint { ell }, &budget);
                match (got, want) {
                    (OptResult::Optimal(g), OptResult::Optimal(w)) => {
                        assert_eq!(g.num_tardy, w.num_tardy, "constraint ell={ell}")
                    }
                    (OptResult::Infeasible { .. }, OptResult::Infeasible { .. }) => {}
                    (g, w) => panic!("status mismatch: {g:?} vs {w:?}"),
                }
            }

            let got = solve_lex_tmax_then_u(&inst, &budget);
            let want = brute_force_permutations(&inst, &ObjectiveSpec::LexTmaxThenU, &budget);
            let (g, w) = (got.expect_optimal("lex-tu"), want.expect_optimal("lex-tu oracle"));
            assert_eq!((g.tmax, g.num_tardy), (w.tmax, w.num_tardy));

            let got = solve_lex_u_then_tmax(&inst, &budget);
            let want = brute_force_permutations(&inst, &ObjectiveSpec::LexUThenTmax, &budget);
            let (g, w) = (got.expect_optimal("lex-ut"), want.expect_optimal("lex-ut oracle"));
            assert_eq!((g.num_tardy, g.tmax), (w.num_tardy, w.tmax));

            for (w1, w2) in [(1, 1), (3, 2), (1, 7)] {
                let got = solve_weighted_sum(&inst, w1, w2, &budget);
                let want = brute_force_permutations(&inst, &ObjectiveSpec::WeightedSum { w1, w2 }, &budget);
                assert_eq!(
                    got.expect_optimal("weighted").objective,
                    want.expect_optimal("weighted oracle").objective,
                    "w=({w1},{w2})"
                );
            }
        }
    }

    #[test]
    fn weighted_sum_with_zero_tardy_weight_is_pure_tmax() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let inst = random_instance(&mut rng, 6);
            let r = solve_weighted_sum(&inst, 5, 0, &Budget::default());
            assert_eq!(r.expect_optimal("w2=0").objective, 5 * edd_schedule(&inst).1);
        }
    }

    #[test]
    fn lex_solvers_pin_their_primary_criterion() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let inst = random_instance(&mut rng, 7);
            let r = solve_lex_tmax_then_u(&inst, &Budget::default());
            assert_eq!(r.expect_optimal("lex-tu").tmax, edd_schedule(&inst).1);
            let r = solve_lex_u_then_tmax(&inst, &Budget::default());
            assert_eq!(r.expect_optimal("lex-ut").num_tardy, moore_hodgson(&inst).1);
        }
    }

    #[test]
    fn decision_matches_solver_and_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let budget = Budget::default();
        for _ in 0..20 {
            let inst = random_instance(&mut rng, 6);
            let total = inst.total_proc();
            for ell in [0, total / 2, total] {
                let opt = solve_constraint(&inst, ell, &budget);
                for k in 0..=(inst.len() as Time) {
                    let dec = decision_constraint(&inst, ell, k, &budget).unwrap();
                    let want = match &opt {
                        OptResult::Optimal(r) => (r.num_tardy as Time) <= k,
                        OptResult::Infeasible { .. } => false,
                        other => panic!("unexpected {other:?}"),
                    };
                    assert_eq!(dec, want, "ell={ell} k={k}");
                    if dec {
                        assert!(decision_constraint(&inst, ell + 1, k, &budget).unwrap());
                        assert!(decision_constraint(&inst, ell, k + 1, &budget).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn decision_with_all_tardy_allowed() {
        let inst = plain_instance(&[(4, 0), (2, 1)]);
        let n = inst.len() as Time;
        assert!(decision_constraint(&inst, inst.total_proc(), n, &Budget::default()).unwrap());
    }

    #[test]
    fn early_set_of_optimum_reproduces_the_objective() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..15 {
            let inst = random_instance(&mut rng, 6);
            let ell = inst.total_proc() / 2;
            if let OptResult::Optimal(r) = solve_constraint(&inst, ell, &Budget::default()) {
                let ev = evaluate(&inst, &r.schedule).unwrap();
                let early: BTreeSet<JobId> =
                    inst.job_ids().filter(|id| !ev.tardy_set.contains(id)).collect();
                let again = canonical_feasible(&inst, &early, ell, &TieBreakRule::standard());
                let ev2 = evaluate(&inst, &again.expect("optimal early set must re-verify")).unwrap();
                assert!(ev2.num_tardy <= r.num_tardy);
            }
        }
    }
}
