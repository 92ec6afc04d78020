//! The two small reductions: a single appended job that pins the minimum
//! maximum tardiness of an instance to a chosen bound, and the uniform
//! scaling that makes a weighted-sum objective decide the lexicographic
//! question.

use serde::{Deserialize, Serialize};

use crate::sched_core::{dec_str, Instance, Job, JobId, JobTag, Time, Variant};

use super::{add, mul, ReductionError, ReductionMeta};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexGadgetMeta {
    /// Tardiness bound of the source constraint question.
    #[serde(with = "dec_str")]
    pub ell: Time,
    /// Total processing time of the source instance.
    #[serde(with = "dec_str")]
    pub total_proc: Time,
    pub star_id: JobId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AprioriMeta {
    /// Weight of the tardy count in the target objective.
    #[serde(with = "dec_str")]
    pub weight: Time,
    /// Every processing time and due date was multiplied by this.
    #[serde(with = "dec_str")]
    pub scale: Time,
}

/// Appends one job with processing time equal to the whole instance and due
/// date `2P - ell`. Any schedule must run it last, where it is tardy by
/// exactly `ell`; the minimum maximum tardiness of the result is therefore
/// `ell` whenever the original admits a schedule within `ell`.
///
/// Requires `ell < P` and every due date at most `P`.
pub fn gen_lex_gadget(instance: &Instance, ell: Time) -> Result<Instance, ReductionError> {
    let total = instance.total_proc();
    if ell >= total {
        return Err(ReductionError::Precondition(format!(
            "bound {ell} must be smaller than the total processing time {total}"
        )));
    }
    if let Some(bad) = instance.jobs.iter().find(|j| j.due > total) {
        return Err(ReductionError::Precondition(format!(
            "job {} has due date {} beyond the total processing time {}",
            bad.id, bad.due, total
        )));
    }
    if ell < 0 {
        return Err(ReductionError::Precondition("bound must be nonnegative".into()));
    }
    let star_id = instance.jobs.iter().map(|j| j.id).max().unwrap_or(0) + 1;
    let due = add(total, total - ell, "gadget due")?;
    let mut jobs = instance.jobs.clone();
    jobs.push(Job::tagged(star_id, total, due, JobTag::GadgetStar));
    let mut out = Instance::new(jobs, Variant::LexTmaxThenU);
    out.meta = Some(ReductionMeta::LexGadget(LexGadgetMeta { ell, total_proc: total, star_id }));
    Ok(out)
}

/// Multiplies every processing time and due date by `2n * weight`. On the
/// scaled instance every nonzero tardiness is a multiple of the factor,
/// which strictly exceeds `weight * (number of jobs)`; a minimizer of
/// `tmax + weight * num_tardy` is then forced to minimize `tmax` first.
pub fn gen_apriori_scaled(instance: &Instance, weight: Time) -> Result<Instance, ReductionError> {
    if weight < 1 {
        return Err(ReductionError::Precondition("weight must be at least 1".into()));
    }
    let factor = mul(2 * instance.len() as Time, weight, "scale factor")?;
    let jobs = instance
        .jobs
        .iter()
        .map(|j| {
            Ok(Job {
                proc: mul(j.proc, factor, "scaled proc")?,
                due: mul(j.due, factor, "scaled due")?,
                ..*j
            })
        })
        .collect::<Result<Vec<_>, ReductionError>>()?;
    let mut out = Instance::new(jobs, Variant::WeightedSum { w1: 1, w2: weight });
    out.meta = Some(ReductionMeta::Apriori(AprioriMeta { weight, scale: factor }));
    Ok(out)
}
