//! Source-problem material: seeded generators for Partition and 3-Partition
//! inputs (optionally with a planted solution) and small brute-force deciders
//! used to certify yes/no answers at desk scale.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::sched_core::{dec_str_vec, Time};

use super::ReductionError;

/// An equal-sum split question: two halves (`m = None`) or `m` groups.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceProblem {
    #[serde(with = "dec_str_vec")]
    pub a: Vec<Time>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
}

/// The hidden solution of a planted instance (1-based element indices).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedSolution {
    pub groups: Vec<Vec<u32>>,
}

/// Random Partition input with a planted equal-sum subset. Returns the
/// elements and the planted subset (1-based, sorted).
pub fn planted_partition<R: Rng>(n: usize, value_max: Time, rng: &mut R) -> Result<(Vec<Time>, BTreeSet<u32>), ReductionError> {
    if n < 2 {
        return Err(ReductionError::Precondition("need at least two elements".into()));
    }
    if value_max < 1 {
        return Err(ReductionError::Precondition("value range must be positive".into()));
    }
    let side = rng.gen_range(1..n);
    let mut left: Vec<Time> = (0..side).map(|_| rng.gen_range(1..=value_max)).collect();
    let mut right: Vec<Time> = (0..n - side).map(|_| rng.gen_range(1..=value_max)).collect();
    // Patch the larger side down to the smaller sum by raising the smaller
    // side's first element; keeps every value positive.
    let (ls, rs): (Time, Time) = (left.iter().sum(), right.iter().sum());
    if ls < rs {
        left[0] += rs - ls;
    } else {
        right[0] += ls - rs;
    }
    let mut indexed: Vec<(Time, bool)> =
        left.iter().map(|&v| (v, true)).chain(right.iter().map(|&v| (v, false))).collect();
    indexed.shuffle(rng);
    let a: Vec<Time> = indexed.iter().map(|&(v, _)| v).collect();
    let subset: BTreeSet<u32> = indexed
        .iter()
        .enumerate()
        .filter(|(_, &(_, in_left))| in_left)
        .map(|(k, _)| k as u32 + 1)
        .collect();
    debug_assert_eq!(subset.iter().map(|&i| a[(i - 1) as usize]).sum::<Time>() * 2, a.iter().sum::<Time>());
    Ok((a, subset))
}

/// Random 3-Partition input with a planted solution of `m` groups. With
/// `strict` every group has exactly three elements; otherwise group sizes
/// vary between 2 and 4. Returns the elements and the planted groups.
pub fn planted_three_partition<R: Rng>(
    m: u32,
    value_max: Time,
    strict: bool,
    rng: &mut R,
) -> Result<(Vec<Time>, Vec<Vec<u32>>), ReductionError> {
    if m < 1 {
        return Err(ReductionError::Precondition("need at least one group".into()));
    }
    if value_max < 1 {
        return Err(ReductionError::Precondition("value range must be positive".into()));
    }
    let sizes: Vec<usize> = (0..m)
        .map(|_| if strict { 3 } else { rng.gen_range(2..=4) })
        .collect();
    // Common target above the largest possible raw group sum so that the
    // padding element stays positive.
    let max_size = *sizes.iter().max().unwrap() as Time;
    let target = max_size * value_max + 1;
    let mut groups_vals: Vec<Vec<Time>> = Vec::new();
    for &size in &sizes {
        let mut vals: Vec<Time> = (0..size - 1).map(|_| rng.gen_range(1..=value_max)).collect();
        let pad = target - vals.iter().sum::<Time>();
        debug_assert!(pad >= 1);
        vals.push(pad);
        groups_vals.push(vals);
    }
    let mut indexed: Vec<(Time, u32)> = groups_vals
        .iter()
        .enumerate()
        .flat_map(|(g, vals)| vals.iter().map(move |&v| (v, g as u32)))
        .collect();
    indexed.shuffle(rng);
    let a: Vec<Time> = indexed.iter().map(|&(v, _)| v).collect();
    let mut groups: Vec<Vec<u32>> = vec![Vec::new(); m as usize];
    for (k, &(_, g)) in indexed.iter().enumerate() {
        groups[g as usize].push(k as u32 + 1);
    }
    Ok((a, groups))
}

/// Random input without a planted solution; only the divisibility of the sum
/// is repaired. May be a yes- or a no-instance.
pub fn random_source<R: Rng>(n: usize, m: u32, value_max: Time, rng: &mut R) -> Result<Vec<Time>, ReductionError> {
    if n == 0 || m < 1 || value_max < 1 {
        return Err(ReductionError::Precondition("need elements, groups, and a positive value range".into()));
    }
    loop {
        let a: Vec<Time> = (0..n).map(|_| rng.gen_range(1..=value_max)).collect();
        if a.iter().sum::<Time>() % m as Time == 0 {
            return Ok(a);
        }
    }
}

/// Exhaustive Partition decider: is there a subset summing to half the total?
pub fn partition_answer(a: &[Time]) -> Option<BTreeSet<u32>> {
    let total: Time = a.iter().sum();
    if total % 2 != 0 {
        return None;
    }
    let t = total / 2;
    let n = a.len();
    assert!(n <= 24, "brute-force decider is for desk sizes");
    for mask in 0u32..(1 << n) {
        let sum: Time = (0..n).filter(|&k| mask >> k & 1 == 1).map(|k| a[k]).sum();
        if sum == t {
            return Some((0..n).filter(|&k| mask >> k & 1 == 1).map(|k| k as u32 + 1).collect());
        }
    }
    None
}

/// Exhaustive 3-Partition decider (group sizes unrestricted): backtracking
/// assignment of elements to `m` groups with sum `total / m` each.
pub fn three_partition_answer(a: &[Time], m: u32) -> Option<Vec<Vec<u32>>> {
    let total: Time = a.iter().sum();
    if m == 0 || total % m as Time != 0 {
        return None;
    }
    let t = total / m as Time;
    let n = a.len();
    assert!(n <= 16, "brute-force decider is for desk sizes");
    // Largest first tightens pruning.
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by_key(|&k| std::cmp::Reverse(a[k]));
    let mut sums = vec![0 as Time; m as usize];
    let mut assign = vec![0u32; n];
    fn rec(
        pos: usize,
        idx: &[usize],
        a: &[Time],
        t: Time,
        sums: &mut [Time],
        assign: &mut [u32],
    ) -> bool {
        if pos == idx.len() {
            return sums.iter().all(|&s| s == t);
        }
        let item = idx[pos];
        let mut tried_empty = false;
        for g in 0..sums.len() {
            if sums[g] == 0 {
                if tried_empty {
                    continue; // empty groups are interchangeable
                }
                tried_empty = true;
            }
            if sums[g] + a[item] <= t {
                sums[g] += a[item];
                assign[item] = g as u32;
                if rec(pos + 1, idx, a, t, sums, assign) {
                    return true;
                }
                sums[g] -= a[item];
            }
        }
        false
    }
    if rec(0, &idx, a, t, &mut sums, &mut assign) {
        let mut groups = vec![Vec::new(); m as usize];
        for (k, &g) in assign.iter().enumerate() {
            groups[g as usize].push(k as u32 + 1);
        }
        Some(groups)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn planted_partition_balances() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let (a, subset) = planted_partition(6, 9, &mut rng).unwrap();
            let s: Time = subset.iter().map(|&i| a[(i - 1) as usize]).sum();
            assert_eq!(2 * s, a.iter().sum::<Time>());
            assert!(a.iter().all(|&v| v >= 1));
        }
    }

    #[test]
    fn planted_three_partition_balances() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for m in 1..=4u32 {
            for strict in [false, true] {
                let (a, groups) = planted_three_partition(m, 7, strict, &mut rng).unwrap();
                let t = a.iter().sum::<Time>() / m as Time;
                for g in &groups {
                    assert_eq!(g.iter().map(|&i| a[(i - 1) as usize]).sum::<Time>(), t);
                    if strict {
                        assert_eq!(g.len(), 3);
                    }
                }
            }
        }
    }

    #[test]
    fn deciders_agree_on_known_answers() {
        assert!(partition_answer(&[1, 1, 2]).is_some());
        assert!(partition_answer(&[1, 1, 1, 7]).is_none());
        assert!(partition_answer(&[1, 1, 1]).is_none()); // odd sum

        assert!(three_partition_answer(&[1, 1, 4], 1).is_some()); // single group is always fine
        assert!(three_partition_answer(&[2, 2, 2, 2, 3, 9], 2).is_none());
        let sol = three_partition_answer(&[1, 1, 2, 2], 2).unwrap();
        let t = 3;
        for g in &sol {
            assert_eq!(g.iter().map(|&i| [1, 1, 2, 2][(i - 1) as usize]).sum::<Time>(), t);
        }
    }

    #[test]
    fn deciders_cross_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let a = random_source(6, 2, 8, &mut rng).unwrap();
            let two_way = partition_answer(&a).is_some();
            let grouped = three_partition_answer(&a, 2).is_some();
            assert_eq!(two_way, grouped, "a={a:?}");
        }
    }

    #[test]
    fn determinism_by_seed() {
        let a1 = planted_partition(6, 9, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        let a2 = planted_partition(6, 9, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        assert_eq!(a1, a2);
    }
}
