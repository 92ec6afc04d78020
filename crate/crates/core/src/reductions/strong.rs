//! The 3-Partition gadget: a job instance whose schedules with maximum
//! tardiness within the bound and at most `2mn` tardy jobs correspond exactly
//! to partitions of the elements into `m` groups of equal sum.
//!
//! The timeline is divided into `m` periods of length `period_len`, each with
//! a first half ending at `half_point[j]`. Every element `i` contributes four
//! complementary number jobs per period; selecting the positive pair encodes
//! membership of element `i` in the union of the first `j` groups. Delimiter
//! jobs pin the half boundaries and force the selected sums to hit `j * t`
//! from both sides; filler jobs fix the timeline at both ends.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::sched_core::{dec_str, dec_str_vec, Instance, Job, JobId, JobTag, Time, Variant};

use super::{add, checked_sum, lookup_tag, mul, Choice, InvalidEncoding, ReductionError, ReductionMeta};

/// Construction parameters of one strong gadget instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrongMeta {
    #[serde(with = "dec_str_vec")]
    pub a: Vec<Time>,
    pub n: u32,
    pub m: u32,
    /// Common group sum `sum(a) / m`.
    #[serde(with = "dec_str")]
    pub group_sum: Time,
    /// Separation constant `10 * n^2 * group_sum`; a multiple of 10 so that
    /// tenth-of-square terms stay integral.
    #[serde(with = "dec_str")]
    pub scale: Time,
    /// Length of one time period.
    #[serde(with = "dec_str")]
    pub period_len: Time,
    /// Length of the first half of period `j` (index `j - 1`).
    #[serde(with = "dec_str_vec")]
    pub half_len: Vec<Time>,
    /// Period boundaries; entry `j` is the end of period `j` (entry 0 is 0).
    #[serde(with = "dec_str_vec")]
    pub period_end: Vec<Time>,
    /// Half boundaries; entry `j - 1` is where the second half of period `j`
    /// starts.
    #[serde(with = "dec_str_vec")]
    pub half_point: Vec<Time>,
    /// Target number of tardy jobs, `2 * m * n`.
    #[serde(with = "dec_str")]
    pub tardy_target: Time,
    /// Target maximum tardiness.
    #[serde(with = "dec_str")]
    pub bound: Time,
    pub job_index: Vec<(JobTag, JobId)>,
}

impl StrongMeta {
    pub fn job(&self, tag: JobTag) -> JobId {
        lookup_tag(&self.job_index, tag)
    }

    pub fn element(&self, i: u32) -> Time {
        self.a[(i - 1) as usize]
    }

    /// First-half length by its closed form; defined for `j` up to `m + 1`
    /// (the extension is what bounds the due window of the last main block).
    pub fn half_len_at(&self, j: u32) -> Time {
        let (n, m, t, a) = (self.n as Time, self.m as Time, self.group_sum, self.scale);
        let j = j as Time;
        2 * n * a * a * a + a * a + (2 * m - 2 * j + 1) * t * a + (m - j) * t
    }

    /// Half boundary by its closed form, likewise defined for `j = m + 1`.
    pub fn half_point_at(&self, j: u32) -> Time {
        self.period_end[(j - 1) as usize] + self.half_len_at(j)
    }
}

/// Builds the gadget instance for elements `a` and group count `m`.
///
/// The element count need not be `3 * m`; the construction is well defined
/// whenever `m` divides the element sum and all elements are positive.
/// Emits `4nm` number jobs, `2m` delimiter jobs, and `2n + 1` filler jobs.
pub fn gen_strong(a: &[Time], m: u32) -> Result<(Instance, StrongMeta), ReductionError> {
    if a.is_empty() {
        return Err(ReductionError::Empty);
    }
    if a.iter().any(|&v| v < 1) {
        return Err(ReductionError::NonPositiveElement);
    }
    if m < 1 {
        return Err(ReductionError::Precondition("group count must be at least 1".into()));
    }
    let sum = checked_sum(a)?;
    if sum % (m as Time) != 0 {
        return Err(ReductionError::Divisibility { sum, m });
    }
    let n = a.len() as u32;
    let t = sum / m as Time;
    let nn = mul(n as Time, n as Time, "n^2")?;
    let scale = mul(10, mul(nn, t, "n^2 t")?, "scale")?;
    let sq = mul(scale, scale, "scale^2")?;
    let cube = mul(sq, scale, "scale^3")?;
    let tenth_sq = sq / 10; // scale is a multiple of 10 by construction
    debug_assert_eq!(scale % 10, 0);

    let (mt, tm) = (mul(m as Time, t, "m t")?, m as Time);
    // period_len = 4n*scale^3 + 2*scale^2 + (2m+1)t*scale + mt
    let period_len = add(
        add(mul(4 * n as Time, cube, "period len")?, 2 * sq, "period len")?,
        add(mul((2 * tm + 1) * t, scale, "period len")?, mt, "period len")?,
        "period len",
    )?;

    let mut half_len = Vec::with_capacity(m as usize);
    let mut period_end = vec![0 as Time];
    let mut half_point = Vec::with_capacity(m as usize);
    for j in 1..=m as Time {
        // half_len_j = 2n*scale^3 + scale^2 + (2m-2j+1)t*scale + (m-j)t
        let hl = add(
            add(mul(2 * n as Time, cube, "half len")?, sq, "half len")?,
            add(mul((2 * tm - 2 * j + 1) * t, scale, "half len")?, (tm - j) * t, "half len")?,
            "half len",
        )?;
        let prev = *period_end.last().unwrap();
        half_len.push(hl);
        half_point.push(add(prev, hl, "half point")?);
        period_end.push(add(prev, period_len, "period end")?);
    }

    let bound = add(mul(2 * n as Time, cube, "bound")?, add(sq, tenth_sq, "bound")?, "bound")?;
    let tardy_target = 2 * m as Time * n as Time;

    let mut jobs = Vec::with_capacity((4 * n * m + 2 * m + 2 * n + 1) as usize);
    let mut job_index = Vec::new();
    let mut next_id: JobId = 0;
    let mut push = |jobs: &mut Vec<Job>, index: &mut Vec<(JobTag, JobId)>, p: Time, d: Time, tag: JobTag| {
        jobs.push(Job::tagged(next_id, p, d, tag));
        index.push((tag, next_id));
        next_id += 1;
    };

    let offset = mul(mt, scale, "offset")?;
    push(&mut jobs, &mut job_index, offset, offset, JobTag::FillerZero);
    for i in 1..=n {
        // Copies of the period-1 positive star jobs.
        let d = 2 * i as Time * cube + tenth_sq;
        push(&mut jobs, &mut job_index, cube, d, JobTag::FillerFirst { i });
    }
    for j in 1..=m {
        let start = period_end[(j - 1) as usize];
        let half = half_point[(j - 1) as usize];
        for i in 1..=n {
            let it = i as Time;
            push(
                &mut jobs,
                &mut job_index,
                cube,
                add(start, 2 * it * cube + tenth_sq, "star due")?,
                JobTag::NumberStar { i, j },
            );
            push(
                &mut jobs,
                &mut job_index,
                add(cube, a[(i - 1) as usize], "neg star proc")?,
                add(start, (2 * it - 1) * cube + tenth_sq, "neg star due")?,
                JobTag::NegNumberStar { i, j },
            );
        }
        push(
            &mut jobs,
            &mut job_index,
            add(sq, mul((tm - j as Time) * t, scale, "delim proc")?, "delim proc")?,
            half,
            JobTag::DelimiterStar { j },
        );
        for i in 1..=n {
            let it = i as Time;
            push(
                &mut jobs,
                &mut job_index,
                add(cube, mul(a[(i - 1) as usize], scale, "main proc")?, "main proc")?,
                add(half, 2 * it * cube + tenth_sq, "main due")?,
                JobTag::Number { i, j },
            );
            push(
                &mut jobs,
                &mut job_index,
                cube,
                add(half, (2 * it - 1) * cube + tenth_sq, "neg main due")?,
                JobTag::NegNumber { i, j },
            );
        }
        push(
            &mut jobs,
            &mut job_index,
            add(sq, mul(j as Time * t, scale, "delim proc")?, "delim proc")?,
            period_end[j as usize],
            JobTag::Delimiter { j },
        );
    }
    for i in 1..=n {
        let d = add(period_end[m as usize], 2 * i as Time * cube + tenth_sq, "last filler due")?;
        push(&mut jobs, &mut job_index, cube, d, JobTag::FillerLast { i });
    }

    let meta = StrongMeta {
        a: a.to_vec(),
        n,
        m,
        group_sum: t,
        scale,
        period_len,
        half_len,
        period_end,
        half_point,
        tardy_target,
        bound,
        job_index,
    };
    let mut instance = Instance::new(jobs, Variant::ConstraintDecision { ell: bound, k: tardy_target });
    instance.meta = Some(ReductionMeta::Strong3p(meta.clone()));
    Ok((instance, meta))
}

/// Per-pair selections of one strong candidate set, indexed `[i - 1][j - 1]`.
/// `Pos` selects the positive job of the pair; all filler and delimiter jobs
/// are implicitly part of the set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrongCandidate {
    pub star: Vec<Vec<Choice>>,
    pub main: Vec<Vec<Choice>>,
}

impl StrongCandidate {
    pub fn all(n: u32, m: u32, choice: Choice) -> StrongCandidate {
        StrongCandidate {
            star: vec![vec![choice; m as usize]; n as usize],
            main: vec![vec![choice; m as usize]; n as usize],
        }
    }

    pub fn n(&self) -> u32 {
        self.star.len() as u32
    }

    pub fn m(&self) -> u32 {
        self.star.first().map_or(0, |row| row.len() as u32)
    }

    /// 1-based accessors matching the tag convention.
    pub fn star_at(&self, i: u32, j: u32) -> Choice {
        self.star[(i - 1) as usize][(j - 1) as usize]
    }

    pub fn main_at(&self, i: u32, j: u32) -> Choice {
        self.main[(i - 1) as usize][(j - 1) as usize]
    }

    /// Sum of elements whose positive star job is selected in period `j`.
    pub fn star_sum(&self, meta: &StrongMeta, j: u32) -> Time {
        (1..=meta.n).filter(|&i| self.star_at(i, j).is_pos()).map(|i| meta.element(i)).sum()
    }

    pub fn main_sum(&self, meta: &StrongMeta, j: u32) -> Time {
        (1..=meta.n).filter(|&i| self.main_at(i, j).is_pos()).map(|i| meta.element(i)).sum()
    }
}

/// Encodes a (partial) partition: the positive pair of element `i` is
/// selected in period `j` iff `i` lies in one of the first `j` groups.
/// Group sums are deliberately not checked here; probing invalid encodings
/// is part of the verification workflow.
pub fn strong_candidate_from_partition(
    meta: &StrongMeta,
    groups: &[Vec<u32>],
) -> Result<StrongCandidate, ReductionError> {
    if groups.len() != meta.m as usize {
        return Err(ReductionError::Precondition(format!(
            "expected {} groups, got {}",
            meta.m,
            groups.len()
        )));
    }
    let n = meta.n;
    let mut first_group = vec![None::<u32>; n as usize];
    for (gj, group) in groups.iter().enumerate() {
        for &i in group {
            if i < 1 || i > n {
                return Err(ReductionError::Index { index: i as usize, n: n as usize });
            }
            let slot = &mut first_group[(i - 1) as usize];
            if slot.is_none() {
                *slot = Some(gj as u32 + 1);
            }
        }
    }
    let mut cand = StrongCandidate::all(n, meta.m, Choice::Neg);
    for i in 1..=n {
        if let Some(g) = first_group[(i - 1) as usize] {
            for j in g..=meta.m {
                cand.star[(i - 1) as usize][(j - 1) as usize] = Choice::Pos;
                cand.main[(i - 1) as usize][(j - 1) as usize] = Choice::Pos;
            }
        }
    }
    Ok(cand)
}

/// Reads a partition back out of a candidate set: the selections must form a
/// nested chain across periods and the selected star sums must hit `j * t`
/// exactly; the groups are then the successive differences.
pub fn strong_extract_partition(
    meta: &StrongMeta,
    candidate: &StrongCandidate,
) -> Result<Vec<BTreeSet<u32>>, InvalidEncoding> {
    let (n, m, t) = (meta.n, meta.m, meta.group_sum);
    for i in 1..=n {
        for j in 1..=m {
            if candidate.star_at(i, j).is_pos() && !candidate.main_at(i, j).is_pos() {
                return Err(InvalidEncoding::ChainViolation {
                    i,
                    detail: format!("star selected but main not selected in period {j}"),
                });
            }
            if j < m && candidate.main_at(i, j).is_pos() && !candidate.star_at(i, j + 1).is_pos() {
                return Err(InvalidEncoding::ChainViolation {
                    i,
                    detail: format!("main selected in period {j} but star not selected in period {}", j + 1),
                });
            }
        }
    }
    for j in 1..=m {
        let got = candidate.star_sum(meta, j);
        let want = j as Time * t;
        if got != want {
            return Err(InvalidEncoding::SumMismatch { j, got, want });
        }
    }
    let mut groups = Vec::with_capacity(m as usize);
    let mut previous: BTreeSet<u32> = BTreeSet::new();
    for j in 1..=m {
        let current: BTreeSet<u32> = (1..=n).filter(|&i| candidate.star_at(i, j).is_pos()).collect();
        groups.push(current.difference(&previous).copied().collect());
        previous = current;
    }
    Ok(groups)
}

/// The job set a candidate encodes: the selected number jobs plus every
/// filler and delimiter job.
pub fn strong_candidate_job_set(meta: &StrongMeta, candidate: &StrongCandidate) -> BTreeSet<JobId> {
    let mut set = BTreeSet::new();
    set.insert(meta.job(JobTag::FillerZero));
    for i in 1..=meta.n {
        set.insert(meta.job(JobTag::FillerFirst { i }));
        set.insert(meta.job(JobTag::FillerLast { i }));
    }
    for j in 1..=meta.m {
        set.insert(meta.job(JobTag::DelimiterStar { j }));
        set.insert(meta.job(JobTag::Delimiter { j }));
        for i in 1..=meta.n {
            set.insert(match candidate.star_at(i, j) {
                Choice::Pos => meta.job(JobTag::NumberStar { i, j }),
                Choice::Neg => meta.job(JobTag::NegNumberStar { i, j }),
            });
            set.insert(match candidate.main_at(i, j) {
                Choice::Pos => meta.job(JobTag::Number { i, j }),
                Choice::Neg => meta.job(JobTag::NegNumber { i, j }),
            });
        }
    }
    set
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sched_core::validate_instance;

    #[test]
    fn smallest_gadget_counts_and_constants() {
        let (inst, meta) = gen_strong(&[1, 1, 1], 1).unwrap();
        assert_eq!(inst.len(), 21); // 12 number + 2 delimiter + 7 filler
        assert_eq!(meta.group_sum, 3);
        assert_eq!(meta.scale, 270);
        assert_eq!(meta.tardy_target, 6);
        assert!(validate_instance(&inst).is_clean());
        let s = meta.scale;
        assert_eq!(meta.bound, 2 * 3 * s * s * s + s * s + s * s / 10);
    }

    #[test]
    fn job_counts_follow_the_shape() {
        for (a, m) in [(vec![1, 1, 2, 2], 2u32), (vec![2, 3, 4, 2, 3, 4], 3), (vec![5, 5], 2)] {
            let n = a.len() as u64;
            let (inst, _) = gen_strong(&a, m).unwrap();
            assert_eq!(inst.len() as u64, 4 * n * m as u64 + 2 * m as u64 + 2 * n + 1);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(gen_strong(&[1, 1], 0).is_err(), true);
        assert!(matches!(gen_strong(&[1, 1, 1], 2), Err(ReductionError::Divisibility { sum: 3, m: 2 })));
        assert!(matches!(gen_strong(&[1, 0, 1], 1), Err(ReductionError::NonPositiveElement)));
        assert!(matches!(gen_strong(&[], 1), Err(ReductionError::Empty)));
    }

    #[test]
    fn table_fidelity_from_closed_forms() {
        let (inst, meta) = gen_strong(&[1, 1, 2, 2], 2).unwrap();
        let (cube, sq) = (meta.scale * meta.scale * meta.scale, meta.scale * meta.scale);
        let tenth = sq / 10;
        let t = meta.group_sum;
        for job in &inst.jobs {
            let (p, d) = (job.proc, job.due);
            match job.tag {
                JobTag::NumberStar { i, j } => {
                    assert_eq!(p, cube);
                    assert_eq!(d, meta.period_end[(j - 1) as usize] + 2 * i as Time * cube + tenth);
                }
                JobTag::NegNumberStar { i, j } => {
                    assert_eq!(p, cube + meta.element(i));
                    assert_eq!(d, meta.period_end[(j - 1) as usize] + (2 * i as Time - 1) * cube + tenth);
                }
                JobTag::Number { i, j } => {
                    assert_eq!(p, cube + meta.element(i) * meta.scale);
                    assert_eq!(d, meta.half_point[(j - 1) as usize] + 2 * i as Time * cube + tenth);
                }
                JobTag::NegNumber { i, j } => {
                    assert_eq!(p, cube);
                    assert_eq!(d, meta.half_point[(j - 1) as usize] + (2 * i as Time - 1) * cube + tenth);
                }
                JobTag::DelimiterStar { j } => {
                    assert_eq!(p, sq + (meta.m - j) as Time * t * meta.scale);
                    assert_eq!(d, meta.half_point[(j - 1) as usize]);
                }
                JobTag::Delimiter { j } => {
                    assert_eq!(p, sq + j as Time * t * meta.scale);
                    assert_eq!(d, meta.period_end[j as usize]);
                }
                JobTag::FillerZero => {
                    assert_eq!(p, meta.m as Time * t * meta.scale);
                    assert_eq!(d, p);
                }
                JobTag::FillerFirst { i } => {
                    assert_eq!(p, cube);
                    let star = meta.job(JobTag::NumberStar { i, j: 1 });
                    assert_eq!(d, inst.jobs.iter().find(|x| x.id == star).unwrap().due);
                }
                JobTag::FillerLast { i } => {
                    assert_eq!(p, cube);
                    assert_eq!(d, meta.period_end[meta.m as usize] + 2 * i as Time * cube + tenth);
                }
                other => panic!("unexpected tag {other:?}"),
            }
        }
    }

    #[test]
    fn due_dates_chain_strictly() {
        let (inst, meta) = gen_strong(&[1, 1, 2, 2], 2).unwrap();
        let due = |tag: JobTag| inst.jobs.iter().find(|x| x.id == meta.job(tag)).unwrap().due;
        let mut expected: Vec<Time> = Vec::new();
        for j in 1..=meta.m {
            for i in 1..=meta.n {
                expected.push(due(JobTag::NegNumberStar { i, j }));
                expected.push(due(JobTag::NumberStar { i, j }));
            }
            for i in 1..=meta.n {
                expected.push(due(JobTag::NegNumber { i, j }));
                expected.push(due(JobTag::Number { i, j }));
            }
        }
        assert!(expected.windows(2).all(|w| w[0] < w[1]), "number-job due dates must increase strictly");
    }

    #[test]
    fn partition_round_trip() {
        let (_, meta) = gen_strong(&[1, 1, 2, 2], 2).unwrap();
        let groups = vec![vec![1, 4], vec![2, 3]];
        let cand = strong_candidate_from_partition(&meta, &groups).unwrap();
        for i in [1u32, 4] {
            assert!(cand.star_at(i, 1).is_pos() && cand.main_at(i, 1).is_pos());
        }
        for i in [2u32, 3] {
            assert!(!cand.star_at(i, 1).is_pos() && !cand.main_at(i, 1).is_pos());
        }
        for i in 1..=4 {
            assert!(cand.star_at(i, 2).is_pos() && cand.main_at(i, 2).is_pos());
        }
        let extracted = strong_extract_partition(&meta, &cand).unwrap();
        assert_eq!(extracted, vec![BTreeSet::from([1, 4]), BTreeSet::from([2, 3])]);
    }

    #[test]
    fn single_group_selects_everything() {
        let (_, meta) = gen_strong(&[1, 1, 1], 1).unwrap();
        let cand = strong_candidate_from_partition(&meta, &[vec![1, 2, 3]]).unwrap();
        assert!((1..=3).all(|i| cand.star_at(i, 1).is_pos() && cand.main_at(i, 1).is_pos()));
    }

    #[test]
    fn extraction_rejects_broken_chains_and_sums() {
        let (_, meta) = gen_strong(&[1, 1, 2, 2], 2).unwrap();
        let mut cand = strong_candidate_from_partition(&meta, &[vec![1, 4], vec![2, 3]]).unwrap();
        cand.star[0][1] = Choice::Neg; // main stays selected in period 1
        assert!(matches!(
            strong_extract_partition(&meta, &cand),
            Err(InvalidEncoding::ChainViolation { i: 1, .. })
        ));

        let cand = strong_candidate_from_partition(&meta, &[vec![1], vec![2, 3, 4]]).unwrap();
        assert!(matches!(
            strong_extract_partition(&meta, &cand),
            Err(InvalidEncoding::SumMismatch { j: 1, got: 1, want: 3 })
        ));
    }

    #[test]
    fn index_errors() {
        let (_, meta) = gen_strong(&[1, 1, 1], 1).unwrap();
        assert!(matches!(
            strong_candidate_from_partition(&meta, &[vec![5]]),
            Err(ReductionError::Index { index: 5, n: 3 })
        ));
    }
}
