//! Non-adaptive algorithms. The full query schedule is a function of
//! `(K, p, delta)` alone and is fixed before the first observation.
//!
//! Repetition counts are chosen so a union bound over all elements (or all
//! pairs) closes at `delta`: `ceil(2 log2(K/delta) / (1-H(p)))` per bit,
//! `ceil(2 log2(K^2/delta) / (1-H(p)))` per pair, and
//! `ceil(4 log2(1/delta) / (1-H(p)))` per item for SEARCH.

use crate::bounds::capacity;
use crate::channel::{Delta, NoiseModel};
use crate::error::Result;
use crate::oracle::{AlgorithmResult, OracleSession};

fn repetitions(coef: f64, log_arg: f64, noise: NoiseModel) -> u64 {
    (coef * log_arg.log2() / capacity(noise)).ceil() as u64
}

/// Queries per bit for [`or_nonadaptive`].
pub fn or_repetitions(k: usize, noise: NoiseModel, delta: Delta) -> u64 {
    repetitions(2.0, k as f64 / delta.get(), noise)
}

/// Comparisons per unordered pair for [`max_nonadaptive`] and
/// [`sort_nonadaptive`].
pub fn pair_repetitions(k: usize, noise: NoiseModel, delta: Delta) -> u64 {
    repetitions(2.0, (k * k) as f64 / delta.get(), noise)
}

/// Comparisons per item for [`search_nonadaptive`].
pub fn search_repetitions(noise: NoiseModel, delta: Delta) -> u64 {
    repetitions(4.0, 1.0 / delta.get(), noise)
}

/// Each bit is read `r` times; the answer is the OR of the per-bit
/// majorities. An even split counts as a one.
pub fn or_nonadaptive(session: &mut OracleSession, delta: Delta) -> Result<AlgorithmResult<bool>> {
    let reps = or_repetitions(session.len(), session.noise(), delta);
    session.measure(|s| {
        let mut any = false;
        for k in 0..s.len() {
            let mut ones = 0;
            for _ in 0..reps {
                ones += s.query_bit(k)? as u64;
            }
            any |= 2 * ones >= reps;
        }
        Ok(any)
    })
}

/// Picks the slot `l` maximising `sum_{i<l} N_i + sum_{i>=l} (T - N_i)`,
/// where `N_i` counts "target above item `i`" answers out of `T`. The
/// smallest maximiser wins ties.
pub fn search_estimate(ones: &[u64], per_item: u64) -> usize {
    let mut score: i64 = ones.iter().map(|&n| (per_item - n) as i64).sum();
    let mut best = (0, score);
    for (l, &n) in ones.iter().enumerate() {
        // moving the boundary past item l turns its (T - N) term into N
        score += 2 * n as i64 - per_item as i64;
        if score > best.1 {
            best = (l + 1, score);
        }
    }
    best.0
}

/// Compares the target with every item the same number of times and
/// returns [`search_estimate`] of the tallies.
pub fn search_nonadaptive(
    session: &mut OracleSession,
    delta: Delta,
) -> Result<AlgorithmResult<usize>> {
    let reps = search_repetitions(session.noise(), delta);
    session.measure(|s| {
        let ones = (0..s.len())
            .map(|i| {
                let mut n = 0;
                for _ in 0..reps {
                    n += s.query_target_comparison(i)? as u64;
                }
                Ok(n)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(search_estimate(&ones, reps))
    })
}

/// Majority outcome of every unordered pair after `reps` comparisons each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairwiseTally {
    k: usize,
    reps: u64,
    /// `above[i * k + j]` for `i < j`: answers saying item `i` is larger.
    above: Vec<u64>,
}

impl PairwiseTally {
    /// Compares each pair `(i, j)`, `i < j`, in lexicographic order.
    pub fn collect(session: &mut OracleSession, reps: u64) -> Result<Self> {
        let k = session.len();
        let mut above = vec![0; k * k];
        for i in 0..k {
            for j in i + 1..k {
                let mut n = 0;
                for _ in 0..reps {
                    n += session.query_comparison(i, j)? as u64;
                }
                above[i * k + j] = n;
            }
        }
        Ok(Self { k, reps, above })
    }

    /// `Some(true)` if a majority said `i > j`, `None` on an even split.
    pub fn majority(&self, i: usize, j: usize) -> Option<bool> {
        let (lo, hi, flip) = if i < j { (i, j, false) } else { (j, i, true) };
        let n = self.above[lo * self.k + hi];
        match (2 * n).cmp(&self.reps) {
            std::cmp::Ordering::Greater => Some(!flip),
            std::cmp::Ordering::Less => Some(flip),
            std::cmp::Ordering::Equal => None,
        }
    }

    /// Number of pairwise majorities each item won.
    pub fn copeland_scores(&self) -> Vec<usize> {
        (0..self.k)
            .map(|i| {
                (0..self.k)
                    .filter(|&j| j != i && self.majority(i, j) == Some(true))
                    .count()
            })
            .collect()
    }

    /// Item with the highest score; the smallest index on ties.
    pub fn copeland_winner(&self) -> usize {
        let scores = self.copeland_scores();
        let mut best = 0;
        for (i, &s) in scores.iter().enumerate() {
            if s > scores[best] {
                best = i;
            }
        }
        best
    }

    /// Items from smallest to largest by score. Items sharing a score are
    /// ordered by the majorities among themselves, then by index.
    pub fn copeland_order(&self) -> Vec<usize> {
        let scores = self.copeland_scores();
        let within: Vec<usize> = (0..self.k)
            .map(|i| {
                (0..self.k)
                    .filter(|&j| {
                        j != i && scores[j] == scores[i] && self.majority(i, j) == Some(true)
                    })
                    .count()
            })
            .collect();
        let mut order: Vec<usize> = (0..self.k).collect();
        order.sort_by_key(|&i| (scores[i], within[i], i));
        order
    }
}

/// Round-robin MAX: every pair compared `r` times, Copeland winner.
pub fn max_nonadaptive(
    session: &mut OracleSession,
    delta: Delta,
) -> Result<AlgorithmResult<usize>> {
    let reps = pair_repetitions(session.len(), session.noise(), delta);
    session.measure(|s| Ok(PairwiseTally::collect(s, reps)?.copeland_winner()))
}

/// Round-robin SORT: the same tally ordered by Copeland score.
pub fn sort_nonadaptive(
    session: &mut OracleSession,
    delta: Delta,
) -> Result<AlgorithmResult<Vec<usize>>> {
    let reps = pair_repetitions(session.len(), session.noise(), delta);
    session.measure(|s| Ok(PairwiseTally::collect(s, reps)?.copeland_order()))
}
