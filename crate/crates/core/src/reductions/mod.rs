//! Hardness-gadget generators and their solution mappings: the 3-Partition
//! gadget for the constraint problem, the Partition gadget for the
//! count-first lexicographic problem, the single-job gadget turning a
//! constraint instance into a tardiness-first lexicographic one, and the
//! due-date scaling that folds a lexicographic question into a weighted sum.

mod simple;
pub mod sources;
mod strong;
mod weak;

pub use simple::{gen_apriori_scaled, gen_lex_gadget, AprioriMeta, LexGadgetMeta};
pub use strong::{
    gen_strong, strong_candidate_from_partition, strong_candidate_job_set, strong_extract_partition,
    StrongCandidate, StrongMeta,
};
pub use weak::{
    gen_weak, gen_weak_with_units, weak_candidate_from_subset, weak_candidate_job_set,
    weak_extract_subset, weak_phase_order, WeakCandidate, WeakMeta, WeakUnits,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sched_core::{JobId, JobTag, Time};

/// Which side of a complementary job pair a candidate set selects.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Choice {
    Pos,
    Neg,
}

impl Choice {
    pub fn is_pos(self) -> bool {
        matches!(self, Choice::Pos)
    }
}

/// Reduction metadata carried inside an instance file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReductionMeta {
    Strong3p(StrongMeta),
    WeakPart(WeakMeta),
    LexGadget(LexGadgetMeta),
    Apriori(AprioriMeta),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReductionError {
    #[error("element sum {sum} is not divisible by the group count {m}")]
    Divisibility { sum: Time, m: u32 },
    #[error("element sum {sum} is odd; an even sum is required")]
    Parity { sum: Time },
    #[error("element values must be positive")]
    NonPositiveElement,
    #[error("no elements given")]
    Empty,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("index {index} out of range 1..={n}")]
    Index { index: usize, n: usize },
    #[error("value overflows 128-bit arithmetic while computing {0}")]
    Overflow(&'static str),
}

/// Why a candidate set fails to encode a source-problem solution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InvalidEncoding {
    /// The nested selection chain breaks between two periods.
    ChainViolation { i: u32, detail: String },
    /// Selected star-side elements do not sum to the required multiple.
    SumMismatch {
        j: u32,
        #[serde(with = "crate::sched_core::dec_str")]
        got: Time,
        #[serde(with = "crate::sched_core::dec_str")]
        want: Time,
    },
    /// Star-side and main-side selections disagree.
    StarMainMismatch { i: u32 },
}

/// Look up a job id by structural tag in a generated instance.
pub fn lookup_tag(index: &[(JobTag, JobId)], tag: JobTag) -> JobId {
    index
        .iter()
        .find(|(t, _)| *t == tag)
        .map(|&(_, id)| id)
        .unwrap_or_else(|| panic!("tag {tag:?} not present in the gadget index"))
}

pub(crate) fn checked_sum(values: &[Time]) -> Result<Time, ReductionError> {
    values
        .iter()
        .try_fold(0 as Time, |acc, &v| acc.checked_add(v))
        .ok_or(ReductionError::Overflow("element sum"))
}

pub(crate) fn mul(a: Time, b: Time, what: &'static str) -> Result<Time, ReductionError> {
    a.checked_mul(b).ok_or(ReductionError::Overflow(what))
}

pub(crate) fn add(a: Time, b: Time, what: &'static str) -> Result<Time, ReductionError> {
    a.checked_add(b).ok_or(ReductionError::Overflow(what))
}
