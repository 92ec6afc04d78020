//! Core domain model: jobs, instances, schedules, and exact evaluation of the
//! two criteria (maximum tardiness and number of tardy jobs).
//!
//! All quantities are exact 128-bit integers; overflow is a hard error, never
//! wraparound (gadget values reach the order of `n * alpha^3` and exceed 64
//! bits already at moderate sizes).

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::reductions::ReductionMeta;

/// Exact time/value type. 128 bits cover every desk-scale gadget; generators
/// use checked arithmetic and refuse inputs that would overflow.
pub type Time = i128;

/// Job identifier, unique within an instance.
pub type JobId = u64;

/// Serde helpers: integers that can carry gadget-scale magnitudes are written
/// as decimal strings so JSON consumers never truncate them to 64-bit floats.
pub mod dec_str {
    use super::Time;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Time, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Time, D::Error> {
        let s = String::deserialize(de)?;
        s.trim().parse::<Time>().map_err(de::Error::custom)
    }
}

/// Same as [`dec_str`] but for vectors of values.
pub mod dec_str_vec {
    use super::Time;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Time], ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<Time>, D::Error> {
        let strings = Vec::<String>::deserialize(de)?;
        strings
            .iter()
            .map(|s| s.trim().parse::<Time>().map_err(de::Error::custom))
            .collect()
    }
}

/// Structural role of a job inside a generated instance.
///
/// Indices `i` (element) and `j` (period) are 1-based. Plain jobs carry no
/// structure; the remaining roles identify gadget positions so that schedules
/// can be checked against their predicted early/tardy status.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JobTag {
    Plain,
    NumberStar { i: u32, j: u32 },
    NegNumberStar { i: u32, j: u32 },
    Number { i: u32, j: u32 },
    NegNumber { i: u32, j: u32 },
    DelimiterStar { j: u32 },
    Delimiter { j: u32 },
    FillerZero,
    FillerFirst { i: u32 },
    FillerLast { i: u32 },
    WeakStar { i: u32 },
    WeakNegStar { i: u32 },
    WeakMain { i: u32 },
    WeakNegMain { i: u32 },
    WeakFiller { i: u32 },
    GadgetStar,
}

/// One unit of work: processing time, due date, and structural tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Job {
    pub id: JobId,
    #[serde(rename = "p", with = "dec_str")]
    pub proc: Time,
    #[serde(rename = "d", with = "dec_str")]
    pub due: Time,
    #[serde(default = "JobTag::plain")]
    pub tag: JobTag,
}

impl JobTag {
    fn plain() -> JobTag {
        JobTag::Plain
    }
}

impl Job {
    pub fn new(id: JobId, proc: Time, due: Time) -> Job {
        Job { id, proc, due, tag: JobTag::Plain }
    }

    pub fn tagged(id: JobId, proc: Time, due: Time, tag: JobTag) -> Job {
        Job { id, proc, due, tag }
    }
}

/// Which bicriteria question the instance poses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Variant {
    /// Is there a schedule with `tmax <= ell` and at most `k` tardy jobs?
    ConstraintDecision {
        #[serde(with = "dec_str")]
        ell: Time,
        #[serde(with = "dec_str")]
        k: Time,
    },
    /// Minimize the number of tardy jobs subject to `tmax <= ell`.
    ConstraintOpt {
        #[serde(with = "dec_str")]
        ell: Time,
    },
    /// Minimize tardy count among schedules of minimum maximum tardiness.
    LexTmaxThenU,
    /// Minimize maximum tardiness among schedules of minimum tardy count.
    LexUThenTmax,
    /// Minimize `w1 * tmax + w2 * num_tardy`.
    WeightedSum {
        #[serde(with = "dec_str")]
        w1: Time,
        #[serde(with = "dec_str")]
        w2: Time,
    },
    None,
}

/// A job multiset plus variant parameters and optional reduction metadata.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub jobs: Vec<Job>,
    pub variant: Variant,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<ReductionMeta>,
}

impl Instance {
    pub fn new(jobs: Vec<Job>, variant: Variant) -> Instance {
        Instance { jobs, variant, meta: None }
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    /// Total processing time of all jobs. Hard error on overflow.
    pub fn total_proc(&self) -> Time {
        self.jobs
            .iter()
            .fold(0 as Time, |acc, j| acc.checked_add(j.proc).expect("total processing time overflows"))
    }

    pub fn job_ids(&self) -> impl Iterator<Item = JobId> + '_ {
        self.jobs.iter().map(|j| j.id)
    }

    /// Sorted `(id, index)` lookup table; also detects duplicate ids.
    pub(crate) fn id_table(&self) -> Vec<(JobId, usize)> {
        let mut table: Vec<(JobId, usize)> = self.jobs.iter().enumerate().map(|(k, j)| (j.id, k)).collect();
        table.sort_unstable();
        table
    }
}

/// A processing order: `order[i]` is the id of the (i+1)-th job on the machine.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub order: Vec<JobId>,
}

impl Schedule {
    pub fn new(order: Vec<JobId>) -> Schedule {
        Schedule { order }
    }
}

/// Completion times, tardiness vector, and the two criteria for one schedule.
///
/// `completion` and `tardiness` are aligned with the instance's `jobs` vector,
/// not with the schedule order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evaluation {
    #[serde(with = "dec_str_vec")]
    pub completion: Vec<Time>,
    #[serde(with = "dec_str_vec")]
    pub tardiness: Vec<Time>,
    #[serde(with = "dec_str")]
    pub tmax: Time,
    pub num_tardy: usize,
    pub tardy_set: BTreeSet<JobId>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("schedule is not a permutation of the instance's job ids: {0}")]
    PermutationError(String),
}

/// Evaluates a schedule: prefix-sum completion times, per-job tardiness,
/// maximum tardiness and tardy count. A job is tardy iff it completes
/// strictly after its due date; completing exactly on time is early.
pub fn evaluate(instance: &Instance, schedule: &Schedule) -> Result<Evaluation, EvalError> {
    let n = instance.jobs.len();
    if schedule.order.len() != n {
        return Err(EvalError::PermutationError(format!(
            "order has {} entries, instance has {} jobs",
            schedule.order.len(),
            n
        )));
    }
    let table = instance.id_table();
    let mut seen = vec![false; n];
    let mut completion = vec![0 as Time; n];
    let mut clock: Time = 0;
    for &id in &schedule.order {
        let idx = match table.binary_search_by_key(&id, |&(jid, _)| jid) {
            Ok(pos) => table[pos].1,
            Err(_) => {
                return Err(EvalError::PermutationError(format!("unknown job id {id}")));
            }
        };
        if seen[idx] {
            return Err(EvalError::PermutationError(format!("job id {id} appears twice")));
        }
        seen[idx] = true;
        clock = clock.checked_add(instance.jobs[idx].proc).expect("completion time overflows");
        completion[idx] = clock;
    }
    let mut tardiness = vec![0 as Time; n];
    let mut tmax: Time = 0;
    let mut tardy_set = BTreeSet::new();
    for (idx, job) in instance.jobs.iter().enumerate() {
        let t = (completion[idx] - job.due).max(0);
        tardiness[idx] = t;
        tmax = tmax.max(t);
        if completion[idx] > job.due {
            tardy_set.insert(job.id);
        }
    }
    let num_tardy = tardy_set.len();
    Ok(Evaluation { completion, tardiness, tmax, num_tardy, tardy_set })
}

/// True iff the evaluated schedule obeys the tardiness bound.
pub fn is_feasible_tmax(evaluation: &Evaluation, ell: Time) -> bool {
    evaluation.tmax <= ell
}

/// Severity of a validation finding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Finding {
    EmptyJobs,
    DuplicateId { id: JobId },
    NegativeProc { id: JobId },
    NegativeDue { id: JobId },
    NegativeBound { param: String },
    NonPositiveWeight { param: String },
    KExceedsJobCount { k: u64, jobs: u64 },
}

impl Finding {
    pub fn severity(&self) -> Severity {
        match self {
            Finding::KExceedsJobCount { .. } => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.findings.iter().all(|f| f.severity() != Severity::Error)
    }

    pub fn is_clean(&self) -> bool {
        self.findings.is_empty()
    }
}

/// Report-style instance validation: duplicate ids, negative values, missing
/// or degenerate variant parameters. Warnings do not invalidate.
pub fn validate_instance(instance: &Instance) -> ValidationReport {
    let mut findings = Vec::new();
    if instance.jobs.is_empty() {
        findings.push(Finding::EmptyJobs);
    }
    let mut ids: Vec<JobId> = instance.jobs.iter().map(|j| j.id).collect();
    ids.sort_unstable();
    for w in ids.windows(2) {
        if w[0] == w[1] {
            findings.push(Finding::DuplicateId { id: w[0] });
        }
    }
    findings.dedup();
    for job in &instance.jobs {
        if job.proc < 0 {
            findings.push(Finding::NegativeProc { id: job.id });
        }
        if job.due < 0 {
            findings.push(Finding::NegativeDue { id: job.id });
        }
    }
    match instance.variant {
        Variant::ConstraintDecision { ell, k } => {
            if ell < 0 {
                findings.push(Finding::NegativeBound { param: "ell".into() });
            }
            if k < 0 {
                findings.push(Finding::NegativeBound { param: "k".into() });
            } else if k as u128 > instance.jobs.len() as u128 {
                findings.push(Finding::KExceedsJobCount {
                    k: k.min(u64::MAX as Time) as u64,
                    jobs: instance.jobs.len() as u64,
                });
            }
        }
        Variant::ConstraintOpt { ell } => {
            if ell < 0 {
                findings.push(Finding::NegativeBound { param: "ell".into() });
            }
        }
        Variant::WeightedSum { w1, w2 } => {
            if w1 <= 0 {
                findings.push(Finding::NonPositiveWeight { param: "w1".into() });
            }
            if w2 < 0 {
                findings.push(Finding::NonPositiveWeight { param: "w2".into() });
            }
        }
        Variant::LexTmaxThenU | Variant::LexUThenTmax | Variant::None => {}
    }
    ValidationReport { findings }
}
