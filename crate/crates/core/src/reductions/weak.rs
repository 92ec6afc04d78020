//! The Partition gadget: a job instance whose minimum-tardy-count schedules
//! that also meet the tardiness bound correspond exactly to splits of the
//! elements into two halves of equal sum.
//!
//! Four magnitude tiers keep the encoding rigid: every main-side job weighs
//! about one `main_unit`, star-side jobs weigh multiples of the much smaller
//! `star_unit`, `marker_unit` powers distinguish which indices were selected,
//! and `element_unit` carries the element values themselves. A block of
//! identical cheap filler jobs per index pads the star side so that exactly
//! one of each complementary pair can be early.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::sched_core::{dec_str, dec_str_vec, Instance, Job, JobId, JobTag, Schedule, Time, Variant};

use super::{add, checked_sum, lookup_tag, mul, Choice, InvalidEncoding, ReductionError, ReductionMeta};

/// The four magnitude tiers. Defaults derive from the element sum; overrides
/// must dominate the defaults and keep the filler arithmetic integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakUnits {
    #[serde(with = "dec_str")]
    pub element_unit: Time,
    #[serde(with = "dec_str")]
    pub marker_unit: Time,
    #[serde(with = "dec_str")]
    pub star_unit: Time,
    #[serde(with = "dec_str")]
    pub main_unit: Time,
}

impl WeakUnits {
    /// `element_unit = 2t+1`, `marker_unit = (2t+1) * element_unit`,
    /// `star_unit = n * 2^(n+2) * marker_unit`, `main_unit = 2n^2 * star_unit`.
    pub fn standard(n: u32, half_sum: Time) -> Result<WeakUnits, ReductionError> {
        let z = add(mul(2, half_sum, "element unit")?, 1, "element unit")?;
        let y = mul(z, z, "marker unit")?;
        let pow = (1 as Time).checked_shl(n + 2).ok_or(ReductionError::Overflow("2^(n+2)"))?;
        let x = mul(mul(n as Time, pow, "star unit")?, y, "star unit")?;
        let w = mul(2 * (n as Time) * (n as Time), x, "main unit")?;
        Ok(WeakUnits { element_unit: z, marker_unit: y, star_unit: x, main_unit: w })
    }

    fn validate(&self, n: u32, half_sum: Time) -> Result<(), ReductionError> {
        let std = WeakUnits::standard(n, half_sum)?;
        if self.element_unit < std.element_unit
            || self.marker_unit < mul(add(mul(2, half_sum, "check")?, 1, "check")?, self.element_unit, "check")?
            || self.star_unit < mul(mul(n as Time, (1 as Time) << (n + 2), "check")?, self.marker_unit, "check")?
            || self.main_unit < mul(2 * (n as Time) * (n as Time), self.star_unit, "check")?
        {
            return Err(ReductionError::Precondition(
                "unit overrides must dominate the standard magnitudes".into(),
            ));
        }
        if self.star_unit % 2 != 0 {
            return Err(ReductionError::Precondition("star unit must be even".into()));
        }
        if self.main_unit % self.star_unit != 0 {
            return Err(ReductionError::Precondition("main unit must be a multiple of the star unit".into()));
        }
        Ok(())
    }
}

/// Construction parameters of one weak gadget instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakMeta {
    #[serde(with = "dec_str_vec")]
    pub a: Vec<Time>,
    pub n: u32,
    /// Half of the element sum.
    #[serde(with = "dec_str")]
    pub half_sum: Time,
    pub units: WeakUnits,
    /// Latest star-side due date; the boundary past which only main-side
    /// jobs have due dates.
    #[serde(with = "dec_str")]
    pub star_block_end: Time,
    /// Filler jobs per index, `2 * main_unit / star_unit`.
    pub filler_mult: u64,
    /// Reference tardy count, `2n`.
    #[serde(with = "dec_str")]
    pub tardy_target: Time,
    /// Reference maximum tardiness bound.
    #[serde(with = "dec_str")]
    pub bound: Time,
    pub job_index: Vec<(JobTag, JobId)>,
}

impl WeakMeta {
    pub fn job(&self, tag: JobTag) -> JobId {
        lookup_tag(&self.job_index, tag)
    }

    pub fn element(&self, i: u32) -> Time {
        self.a[(i - 1) as usize]
    }

    /// Ids of the filler block of index `i`, in schedule order.
    pub fn filler_block(&self, i: u32) -> Vec<JobId> {
        self.job_index
            .iter()
            .filter(|(t, _)| matches!(t, JobTag::WeakFiller { i: fi } if *fi == i))
            .map(|&(_, id)| id)
            .collect()
    }
}

pub fn gen_weak(a: &[Time]) -> Result<(Instance, WeakMeta), ReductionError> {
    let n = a.len() as u32;
    let sum = checked_sum(a)?;
    if sum % 2 != 0 {
        return Err(ReductionError::Parity { sum });
    }
    let units = WeakUnits::standard(n, sum / 2)?;
    gen_weak_with_units(a, units)
}

/// Builds the gadget with explicit magnitude tiers. Emits `4n` pair jobs and
/// `n * filler_mult` filler jobs.
pub fn gen_weak_with_units(a: &[Time], units: WeakUnits) -> Result<(Instance, WeakMeta), ReductionError> {
    if a.is_empty() {
        return Err(ReductionError::Empty);
    }
    if a.iter().any(|&v| v < 1) {
        return Err(ReductionError::NonPositiveElement);
    }
    let sum = checked_sum(a)?;
    if sum % 2 != 0 {
        return Err(ReductionError::Parity { sum });
    }
    let n = a.len() as u32;
    let t = sum / 2;
    units.validate(n, t)?;
    let WeakUnits { element_unit: z, marker_unit: y, star_unit: x, main_unit: w } = units;

    let filler_mult_time = 2 * w / x;
    if filler_mult_time > 1_000_000 {
        return Err(ReductionError::Precondition(format!(
            "filler multiplicity {filler_mult_time} is unreasonably large"
        )));
    }
    let filler_mult = filler_mult_time as u64;

    // Prefix sums of i * star_unit and 2^i * marker_unit for i = 0..=n.
    let mut star_prefix = vec![0 as Time];
    let mut marker_prefix = vec![0 as Time];
    for i in 1..=n as Time {
        star_prefix.push(add(*star_prefix.last().unwrap(), mul(i, x, "star prefix")?, "star prefix")?);
        let marker = mul((1 as Time).checked_shl(i as u32).ok_or(ReductionError::Overflow("2^i"))?, y, "marker")?;
        marker_prefix.push(add(*marker_prefix.last().unwrap(), marker, "marker prefix")?);
    }

    let star_block_end = add(add(mul(n as Time, w, "block end")?, star_prefix[n as usize], "block end")?, t, "block end")?;
    let bound = add(
        add(
            add(mul(n as Time, w, "bound")?, star_prefix[n as usize], "bound")?,
            marker_prefix[n as usize],
            "bound",
        )?,
        add(mul(t, z, "bound")?, t, "bound")?,
    "bound",
    )?;
    let tardy_target = 2 * n as Time;

    let mut jobs = Vec::with_capacity((4 * n as u64 + n as u64 * filler_mult) as usize);
    let mut job_index = Vec::new();
    let mut next_id: JobId = 0;
    let mut push = |jobs: &mut Vec<Job>, index: &mut Vec<(JobTag, JobId)>, p: Time, d: Time, tag: JobTag| {
        jobs.push(Job::tagged(next_id, p, d, tag));
        index.push((tag, next_id));
        next_id += 1;
    };

    for i in 1..=n {
        let it = i as Time;
        let star_due = add(add(mul(it, w, "star due")?, star_prefix[i as usize], "star due")?, t, "star due")?;
        push(&mut jobs, &mut job_index, mul(it, x, "star proc")?, star_due, JobTag::WeakStar { i });
        push(
            &mut jobs,
            &mut job_index,
            add(mul(it, x, "neg star proc")?, a[(i - 1) as usize], "neg star proc")?,
            star_due - w,
            JobTag::WeakNegStar { i },
        );
        for _ in 0..filler_mult {
            push(&mut jobs, &mut job_index, x / 2, star_due, JobTag::WeakFiller { i });
        }
    }
    for i in 1..=n {
        let it = i as Time;
        let main_due = add(
            add(
                add(star_block_end, mul(it, w, "main due")?, "main due")?,
                add(star_prefix[i as usize], marker_prefix[i as usize], "main due")?,
                "main due",
            )?,
            add(mul(t, z, "main due")?, t, "main due")?,
            "main due",
        )?;
        let marker = marker_prefix[i as usize] - marker_prefix[(i - 1) as usize];
        push(
            &mut jobs,
            &mut job_index,
            add(add(w, marker, "main proc")?, mul(a[(i - 1) as usize], z, "main proc")?, "main proc")?,
            main_due,
            JobTag::WeakMain { i },
        );
        push(
            &mut jobs,
            &mut job_index,
            add(w, marker, "neg main proc")?,
            main_due - mul(it, x, "neg main due")?,
            JobTag::WeakNegMain { i },
        );
    }

    let meta = WeakMeta {
        a: a.to_vec(),
        n,
        half_sum: t,
        units,
        star_block_end,
        filler_mult,
        tardy_target,
        bound,
        job_index,
    };
    let mut instance = Instance::new(jobs, Variant::LexUThenTmax);
    instance.meta = Some(ReductionMeta::WeakPart(meta.clone()));
    Ok((instance, meta))
}

/// Per-pair selections of one weak candidate set, indexed `[i - 1]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakCandidate {
    pub star: Vec<Choice>,
    pub main: Vec<Choice>,
}

impl WeakCandidate {
    pub fn all(n: u32, choice: Choice) -> WeakCandidate {
        WeakCandidate { star: vec![choice; n as usize], main: vec![choice; n as usize] }
    }

    pub fn n(&self) -> u32 {
        self.star.len() as u32
    }

    pub fn star_at(&self, i: u32) -> Choice {
        self.star[(i - 1) as usize]
    }

    pub fn main_at(&self, i: u32) -> Choice {
        self.main[(i - 1) as usize]
    }

    /// Sum of elements whose negative star job is selected.
    pub fn neg_star_sum(&self, meta: &WeakMeta) -> Time {
        (1..=meta.n).filter(|&i| !self.star_at(i).is_pos()).map(|i| meta.element(i)).sum()
    }

    /// Sum of elements whose positive main job is selected.
    pub fn main_sum(&self, meta: &WeakMeta) -> Time {
        (1..=meta.n).filter(|&i| self.main_at(i).is_pos()).map(|i| meta.element(i)).sum()
    }

    /// Prefix `sum_{i0 <= i, main selected} a_i0`.
    pub fn main_prefix_sum(&self, meta: &WeakMeta, i: u32) -> Time {
        (1..=i).filter(|&i0| self.main_at(i0).is_pos()).map(|i0| meta.element(i0)).sum()
    }
}

/// Candidate selecting the positive pair exactly on the given subset.
pub fn weak_candidate_from_subset(meta: &WeakMeta, subset: &BTreeSet<u32>) -> Result<WeakCandidate, ReductionError> {
    if let Some(&bad) = subset.iter().find(|&&i| i < 1 || i > meta.n) {
        return Err(ReductionError::Index { index: bad as usize, n: meta.n as usize });
    }
    let mut cand = WeakCandidate::all(meta.n, Choice::Neg);
    for &i in subset {
        cand.star[(i - 1) as usize] = Choice::Pos;
        cand.main[(i - 1) as usize] = Choice::Pos;
    }
    Ok(cand)
}

/// Reads the encoded subset back out: star-side and main-side selections must
/// agree and the selected elements must sum to half the total.
pub fn weak_extract_subset(meta: &WeakMeta, candidate: &WeakCandidate) -> Result<BTreeSet<u32>, InvalidEncoding> {
    for i in 1..=meta.n {
        if candidate.star_at(i).is_pos() != candidate.main_at(i).is_pos() {
            return Err(InvalidEncoding::StarMainMismatch { i });
        }
    }
    let selected: BTreeSet<u32> = (1..=meta.n).filter(|&i| candidate.star_at(i).is_pos()).collect();
    let got: Time = selected.iter().map(|&i| meta.element(i)).sum();
    if got != meta.half_sum {
        return Err(InvalidEncoding::SumMismatch { j: 1, got, want: meta.half_sum });
    }
    Ok(selected)
}

/// The job set a candidate encodes: the selected pair jobs plus every filler.
pub fn weak_candidate_job_set(meta: &WeakMeta, candidate: &WeakCandidate) -> BTreeSet<JobId> {
    let mut set = BTreeSet::new();
    for i in 1..=meta.n {
        set.extend(meta.filler_block(i));
        set.insert(match candidate.star_at(i) {
            Choice::Pos => meta.job(JobTag::WeakStar { i }),
            Choice::Neg => meta.job(JobTag::WeakNegStar { i }),
        });
        set.insert(match candidate.main_at(i) {
            Choice::Pos => meta.job(JobTag::WeakMain { i }),
            Choice::Neg => meta.job(JobTag::WeakNegMain { i }),
        });
    }
    set
}

/// The explicit three-phase order of a candidate schedule: first the selected
/// star-side job and filler block per index, then per index the unselected
/// star-side job around the selected main-side job, finally the unselected
/// main-side jobs. Equals the canonical schedule under the standard ties.
pub fn weak_phase_order(meta: &WeakMeta, candidate: &WeakCandidate) -> Schedule {
    let mut order: Vec<JobId> = Vec::new();
    for i in 1..=meta.n {
        order.push(match candidate.star_at(i) {
            Choice::Pos => meta.job(JobTag::WeakStar { i }),
            Choice::Neg => meta.job(JobTag::WeakNegStar { i }),
        });
        order.extend(meta.filler_block(i));
    }
    for i in 1..=meta.n {
        let chosen_main = match candidate.main_at(i) {
            Choice::Pos => meta.job(JobTag::WeakMain { i }),
            Choice::Neg => meta.job(JobTag::WeakNegMain { i }),
        };
        match candidate.star_at(i) {
            Choice::Pos => {
                order.push(meta.job(JobTag::WeakNegStar { i }));
                order.push(chosen_main);
            }
            Choice::Neg => {
                order.push(chosen_main);
                order.push(meta.job(JobTag::WeakStar { i }));
            }
        }
    }
    for i in 1..=meta.n {
        order.push(match candidate.main_at(i) {
            Choice::Pos => meta.job(JobTag::WeakNegMain { i }),
            Choice::Neg => meta.job(JobTag::WeakMain { i }),
        });
    }
    Schedule::new(order)
}
