//! Single-machine bicriteria scheduling toolkit.
//!
//! Combines the two classic due-date criteria — maximum tardiness and number
//! of tardy jobs — in their constraint, lexicographic (both orders), and
//! weighted-sum variants. Provides the polynomial building blocks (EDD,
//! Moore–Hodgson, canonical schedules), exact desk-scale solvers certified by
//! a permutation oracle, generators for the hardness gadgets that link these
//! problems to Partition and 3-Partition, and a verification lab that checks
//! the gadgets' arithmetic identities and early/tardy structure mechanically.

pub mod classic;
pub mod exact;
pub mod lemma_lab;
pub mod reductions;
pub mod sched_core;

pub use classic::{canonical_schedule, edd_for_set, edd_schedule, min_tmax_given_early, moore_hodgson, TieBreakRule};
pub use exact::{
    brute_force_permutations, decision_constraint, solve_constraint, solve_lex_tmax_then_u,
    solve_lex_u_then_tmax, solve_weighted_sum, Budget, ObjectiveSpec, OptResult, OptimalResult,
};
pub use sched_core::{
    evaluate, is_feasible_tmax, validate_instance, Evaluation, Instance, Job, JobId, JobTag, Schedule,
    Time, Variant,
};
