//! Reference computations that share no code path with the closed forms
//! they check: explicit Markov-chain evolution, outcome enumeration, and
//! plain Monte Carlo through the oracle.

use crate::channel::NoiseModel;
use crate::instance::BitInstance;
use crate::oracle::OracleSession;

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Ruin probability and expected absorption time of the `+-1` walk that
/// steps toward the truth with probability `1-p`, started at 0 and absorbed
/// at `+-barrier`, computed by pushing the state distribution through the
/// transition matrix until the surviving mass is negligible.
///
/// Expected time is accumulated as `sum_t P(T > t)`.
pub fn walk_by_transition_matrix(noise: NoiseModel, barrier: u32) -> (f64, f64) {
    let p = noise.p();
    let m = barrier as usize;
    // transient states -(m-1)..=(m-1), stored at offset m-1
    let width = 2 * m - 1;
    let mut dist = vec![0.0f64; width];
    let mut next = vec![0.0f64; width];
    dist[m - 1] = 1.0;
    let mut ruin = CompensatedSum::default();
    let mut time = CompensatedSum::default();
    let mut alive = 1.0f64;
    let mut steps = 0u64;
    while alive > 1e-18 && steps < 50_000_000 {
        time.add(alive);
        next.iter_mut().for_each(|x| *x = 0.0);
        for (idx, &mass) in dist.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let (up, down) = (mass * (1.0 - p), mass * p);
            if idx + 1 < width {
                next[idx + 1] += up;
            }
            if idx >= 1 {
                next[idx - 1] += down;
            } else {
                ruin.add(down);
            }
        }
        std::mem::swap(&mut dist, &mut next);
        alive = dist.iter().sum();
        steps += 1;
    }
    (ruin.value(), time.value())
}

/// `P(Bin(n, p) >= ceil(n/2))` by enumerating all `2^n` flip patterns.
pub fn majority_error_by_enumeration(n: u32, noise: NoiseModel) -> f64 {
    assert!(n <= 24, "enumeration is exponential in n");
    let p = noise.p();
    let need = n.div_ceil(2);
    let mut total = CompensatedSum::default();
    for pattern in 0u64..(1 << n) {
        let flips = pattern.count_ones();
        if flips >= need {
            total.add(p.powi(flips as i32) * (1.0 - p).powi((n - flips) as i32));
        }
    }
    total.value()
}

/// Fraction of `samples` majority votes of `n` noisy reads of a zero bit
/// that come out wrong (ties counted as wrong). Every read goes through an
/// [`OracleSession`].
pub fn majority_error_by_simulation(n: u64, noise: NoiseModel, samples: u64, seed: u64) -> f64 {
    let mut session = OracleSession::new(BitInstance::zeros(1).expect("one bit"), noise, seed);
    let mut wrong = 0u64;
    for _ in 0..samples {
        let mut ones = 0u64;
        for _ in 0..n {
            ones += session.query_bit(0).expect("bit 0 exists") as u64;
        }
        wrong += (2 * ones >= n) as u64;
    }
    wrong as f64 / samples as f64
}

/// Queries of a halving bracket over `k` elements, counted by replaying
/// the list manipulation: `per_survivor(i)` queries for every element alive
/// in round `i`, then `final_stage`.
pub fn bracket_query_count(k: usize, per_survivor: impl Fn(u32) -> u64, final_stage: u64) -> u64 {
    let mut alive: Vec<usize> = (0..k).collect();
    let mut total = 0;
    let mut round = 1;
    while alive.len() > 1 {
        total += per_survivor(round) * alive.len() as u64;
        alive = alive.chunks(2).map(|c| c[0]).collect();
        round += 1;
    }
    total + final_stage
}
