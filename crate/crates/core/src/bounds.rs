//! Information-theoretic quantities, the bound table, and exact analytic
//! results for the building blocks the algorithms are made of.
//!
//! All logarithms in bound expressions are base 2. Asymptotic expressions
//! are evaluated with unit constants.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{Delta, NoiseModel};
use crate::error::{Error, Result};

/// Relative slack when deciding whether a log-odds level reaches a
/// stopping threshold. Without it, thresholds that are an exact multiple of
/// the per-observation step (e.g. `p = delta = 1/4`) would need one extra
/// observation purely from rounding.
pub(crate) const THRESHOLD_SLACK: f64 = 1e-9;

/// `H(p) = -p log2 p - (1-p) log2 (1-p)`, with `0 log 0 = 0`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    Ok(entropy_term(p) + entropy_term(1.0 - p))
}

fn entropy_term(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

/// `1 - H(p)`, the capacity of BSC(p).
pub fn capacity(noise: NoiseModel) -> f64 {
    1.0 - binary_entropy(noise.p()).expect("noise model holds a probability")
}

/// `D_KL(p || 1-p) = (1-2p) log2((1-p)/p)` in bits.
pub fn kl_flip(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    if p == 0.0 || p == 1.0 {
        return Err(Error::InfiniteDivergence(p));
    }
    Ok((1.0 - 2.0 * p) * ((1.0 - p) / p).log2())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Or,
    Max,
    Search,
    Sort,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Setting {
    FixedAdaptive,
    FixedNonadaptive,
    VariableAdaptive,
}

impl Problem {
    pub const ALL: [Problem; 4] = [Problem::Or, Problem::Max, Problem::Search, Problem::Sort];

    pub fn name(self) -> &'static str {
        match self {
            Problem::Or => "or",
            Problem::Max => "max",
            Problem::Search => "search",
            Problem::Sort => "sort",
        }
    }
}

impl Setting {
    pub const ALL: [Setting; 3] = [
        Setting::FixedAdaptive,
        Setting::FixedNonadaptive,
        Setting::VariableAdaptive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Setting::FixedAdaptive => "fixed_adaptive",
            Setting::FixedNonadaptive => "fixed_nonadaptive",
            Setting::VariableAdaptive => "variable_adaptive",
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Problem::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown problem '{s}' (or|max|search|sort)")))
    }
}

impl FromStr for Setting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Setting::ALL
            .into_iter()
            .find(|x| x.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown setting '{s}' (fixed_adaptive|fixed_nonadaptive|variable_adaptive)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSpec {
    pub problem: Problem,
    pub setting: Setting,
    pub k: usize,
    pub p: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundValue {
    pub lower: f64,
    pub upper: f64,
    pub constants_note: &'static str,
}

const UNIT_CONSTANTS: &str =
    "order expressions evaluated with unit constants; true constants unspecified";

/// Evaluates the lower and upper query-complexity expressions for one row
/// of the bound table. Variable-length rows are tight, so both fields hold
/// the same expression.
pub fn bound_table(spec: &BoundSpec) -> Result<BoundValue> {
    if !(spec.p > 0.0 && spec.p < 0.5) {
        return Err(Error::BoundNoise(spec.p));
    }
    let delta = Delta::new(spec.delta)?.get();
    if spec.k == 0 {
        return Err(Error::EmptyInstance);
    }
    let k = spec.k as f64;
    let cap = 1.0 - binary_entropy(spec.p)?;
    let kl = kl_flip(spec.p)?;
    let log_k = k.log2();
    let log_inv_delta = (1.0 / delta).log2();
    let log_k_over_delta = (k / delta).log2();

    use Problem::*;
    use Setting::*;
    let (lower, upper) = match (spec.setting, spec.problem) {
        (FixedAdaptive, Or | Max) => (k / cap + k * log_inv_delta / kl, k * log_inv_delta / cap),
        (FixedAdaptive, Search) => (log_k / cap + log_inv_delta / kl, log_k_over_delta / cap),
        (FixedAdaptive, Sort) => (
            k * log_k / cap + k * log_k_over_delta / kl,
            k * log_k_over_delta / cap,
        ),
        (FixedNonadaptive, Or) => {
            let llr = ((1.0 - spec.p) / spec.p).log2();
            let lower = k.max(k * log_k * spec.p / cap).max(k * log_k / llr);
            (lower, k * log_k_over_delta / cap)
        }
        (FixedNonadaptive, Max) => (
            k * k / cap + k * k * log_inv_delta / kl,
            k * k * log_k_over_delta / cap,
        ),
        (FixedNonadaptive, Search) => (k / cap + k * log_inv_delta / kl, k * log_inv_delta / cap),
        (FixedNonadaptive, Sort) => (k * k + k * k * log_k / kl, k * k * log_k_over_delta / cap),
        (VariableAdaptive, Or | Max) => {
            let v = k / cap + k * log_inv_delta / kl;
            (v, v)
        }
        (VariableAdaptive, Search) => {
            let v = log_k / cap + log_inv_delta / kl;
            (v, v)
        }
        (VariableAdaptive, Sort) => {
            let v = k * log_k / cap + k * log_k_over_delta / kl;
            (v, v)
        }
    };
    Ok(BoundValue {
        lower,
        upper,
        constants_note: UNIT_CONSTANTS,
    })
}

/// Exact error probability of an `n`-sample majority vote over BSC(p):
/// `P(Bin(n, p) > n/2)`, plus `P(Bin(n, p) = n/2)` for even `n` since a
/// tie is counted as an error.
pub fn majority_error_exact(n: u64, noise: NoiseModel) -> Result<f64> {
    if n == 0 {
        return Err(Error::Config("majority vote needs n >= 1".to_owned()));
    }
    let p = noise.p();
    if p == 0.0 {
        return Ok(0.0);
    }
    binomial_upper_tail(n, p, n.div_ceil(2))
}

/// `P(Bin(n, p) >= from)`, summed term by term in log space.
pub(crate) fn binomial_upper_tail(n: u64, p: f64, from: u64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    if from > n {
        return Ok(0.0);
    }
    if p == 0.0 {
        return Ok(if from == 0 { 1.0 } else { 0.0 });
    }
    if p == 1.0 {
        return Ok(1.0);
    }
    let (ln_p, ln_q) = (p.ln(), (-p).ln_1p());
    let mut ln_choose = 0.0;
    for k in 0..from {
        ln_choose += ((n - k) as f64).ln() - ((k + 1) as f64).ln();
    }
    let ln_terms: Vec<f64> = (from..=n)
        .map(|k| {
            let t = ln_choose + k as f64 * ln_p + (n - k) as f64 * ln_q;
            if k < n {
                ln_choose += ((n - k) as f64).ln() - ((k + 1) as f64).ln();
            }
            t
        })
        .collect();
    let peak = ln_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = ln_terms.iter().rev().map(|t| (t - peak).exp()).sum();
    Ok((peak + sum.ln()).exp().min(1.0))
}

/// Exact behaviour of a posterior stopping loop: a `+-1` walk on the
/// log-likelihood scale, stepping toward the truth with probability `1-p`,
/// absorbed at `+-barrier` steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosteriorLoopStats {
    pub barrier: u32,
    pub error: f64,
    pub expected_queries: f64,
}

/// Log-odds level `ln((1-d)/d)` for `d = exp(ln_delta)`.
pub(crate) fn log_odds_threshold(ln_delta: f64) -> f64 {
    (-ln_delta.exp()).ln_1p() - ln_delta
}

/// Number of net agreeing observations the posterior loop needs before its
/// posterior leaves `(d, 1-d)`, with `d = exp(ln_delta)`. One on the
/// noiseless channel.
pub fn posterior_barrier(noise: NoiseModel, ln_delta: f64) -> u32 {
    if noise.is_noiseless() {
        return 1;
    }
    let ratio = log_odds_threshold(ln_delta) / noise.log_likelihood_ratio();
    let m = (ratio - THRESHOLD_SLACK * ratio.max(1.0)).ceil();
    (m as u32).max(1)
}

/// Gambler's-ruin closed form for a symmetric barrier of `m` steps.
pub fn walk_stats(noise: NoiseModel, barrier: u32) -> PosteriorLoopStats {
    let p = noise.p();
    if p == 0.0 {
        return PosteriorLoopStats {
            barrier,
            error: 0.0,
            expected_queries: barrier as f64,
        };
    }
    let m = barrier as f64;
    // r^m with r = p/(1-p)
    let rm = (-m * noise.log_likelihood_ratio()).exp();
    PosteriorLoopStats {
        barrier,
        error: rm / (1.0 + rm),
        expected_queries: m * (1.0 - rm) / ((1.0 + rm) * (1.0 - 2.0 * p)),
    }
}

/// Error probability and expected length of the loop that observes until
/// its posterior leaves `(delta, 1-delta)`.
pub fn posterior_loop_stats(noise: NoiseModel, delta: Delta) -> PosteriorLoopStats {
    posterior_loop_stats_ln(noise, delta.get().ln())
}

pub fn posterior_loop_stats_ln(noise: NoiseModel, ln_delta: f64) -> PosteriorLoopStats {
    walk_stats(noise, posterior_barrier(noise, ln_delta))
}

/// Repetitions per element in the fixed-length algorithms:
/// `ceil(coef * log2(1/delta) / (1 - H(p)))`.
pub fn fixed_repetitions(coef: f64, noise: NoiseModel, delta: Delta) -> u64 {
    (coef * (1.0 / delta.get()).log2() / capacity(noise)).ceil() as u64
}

/// `ceil(log2 k)`: number of halving rounds a bracket of `k` items needs.
pub fn halving_rounds(k: usize) -> u32 {
    if k <= 1 {
        0
    } else {
        usize::BITS - (k - 1).leading_zeros()
    }
}

/// Repetitions per surviving element in round `round` (1-based) of the
/// fixed-length tournament.
pub fn tournament_round_repetitions(round: u32, noise: NoiseModel, delta: Delta) -> u64 {
    fixed_repetitions(4.0 * (2 * round - 1) as f64, noise, delta)
}

/// Repetitions of the final single-element majority of the OR tournament.
pub fn tournament_final_repetitions(noise: NoiseModel, delta: Delta) -> u64 {
    fixed_repetitions(6.0, noise, delta)
}

/// Total queries of the fixed-length OR tournament on `k` bits:
/// the final majority plus, for each round `i`, one repetition block per
/// survivor, of which there are `ceil(k / 2^(i-1))`.
pub fn tournament_query_count(k: usize, noise: NoiseModel, delta: Delta) -> u64 {
    let rounds: u64 = (1..=halving_rounds(k))
        .map(|i| {
            let survivors = k.div_ceil(1 << (i - 1)) as u64;
            tournament_round_repetitions(i, noise, delta) * survivors
        })
        .sum();
    tournament_final_repetitions(noise, delta) + rounds
}

/// Total comparisons of the fixed-length MAX tournament on `k` items: one
/// repetition block per pair in every round, no final stage.
pub fn max_tournament_query_count(k: usize, noise: NoiseModel, delta: Delta) -> u64 {
    (1..=halving_rounds(k))
        .map(|i| {
            let pairs = (k.div_ceil(1 << (i - 1)) / 2) as u64;
            tournament_round_repetitions(i, noise, delta) * pairs
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn noise(p: f64) -> NoiseModel {
        NoiseModel::new(p).unwrap()
    }

    fn delta(d: f64) -> Delta {
        Delta::new(d).unwrap()
    }

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        // mpmath, 30 digits
        assert!((binary_entropy(0.1).unwrap() - 0.468_995_593_589_281_2).abs() < 1e-15);
        assert!(binary_entropy(1.5).is_err());
    }

    #[test]
    fn entropy_shape_on_grid() {
        let grid: Vec<f64> = (0..=1000).map(|i| i as f64 / 1000.0).collect();
        for &p in &grid {
            let h = binary_entropy(p).unwrap();
            assert!((h - binary_entropy(1.0 - p).unwrap()).abs() < 1e-12);
            assert!(h <= 1.0);
        }
        for w in grid.windows(3) {
            let mid = binary_entropy(w[1]).unwrap();
            let chord = 0.5 * (binary_entropy(w[0]).unwrap() + binary_entropy(w[2]).unwrap());
            assert!(mid >= chord - 1e-12, "concavity fails near {}", w[1]);
        }
    }

    #[test]
    fn kl_values() {
        assert_eq!(kl_flip(0.5).unwrap(), 0.0);
        // 0.8 * log2(9), mpmath
        assert!((kl_flip(0.1).unwrap() - 2.535_940_001_153_85).abs() < 1e-12);
        assert_eq!(kl_flip(0.0), Err(Error::InfiniteDivergence(0.0)));
        assert_eq!(kl_flip(1.0), Err(Error::InfiniteDivergence(1.0)));
    }

    #[test]
    fn kl_dominates_capacity() {
        for i in 1..1000 {
            let p = i as f64 / 2000.0;
            assert!(kl_flip(p).unwrap() >= 1.0 - binary_entropy(p).unwrap());
        }
    }

    #[test]
    fn capacity_ratio_bracket() {
        for i in 0..=1000 {
            let p = i as f64 / 1000.0;
            if p == 0.5 {
                continue;
            }
            let ratio = (0.5 - p).powi(2) / (1.0 - binary_entropy(p).unwrap());
            assert!((0.25..=0.5 + 1e-12).contains(&ratio), "p={p} ratio={ratio}");
        }
    }

    #[test]
    fn bound_table_examples() {
        let v = bound_table(&BoundSpec {
            problem: Problem::Or,
            setting: Setting::VariableAdaptive,
            k: 1,
            p: 0.1,
            delta: 0.01,
        })
        .unwrap();
        // 1/(1 - H(0.1)) + log2(100)/kl(0.1), mpmath
        assert!((v.lower - 4.503_102_636_634_97).abs() < 1e-9);
        assert_eq!(v.lower, v.upper);

        let v = bound_table(&BoundSpec {
            problem: Problem::Sort,
            setting: Setting::FixedNonadaptive,
            k: 4,
            p: 0.25,
            delta: 0.1,
        })
        .unwrap();
        assert!((v.lower - 56.379_504_228_573_28).abs() < 1e-9);

        let v = bound_table(&BoundSpec {
            problem: Problem::Search,
            setting: Setting::FixedAdaptive,
            k: 2,
            p: 0.1,
            delta: 0.489,
        })
        .unwrap();
        let first = 1.0 / (1.0 - binary_entropy(0.1).unwrap());
        assert!(first > v.lower - first);
    }

    #[test]
    fn bound_table_rejects() {
        let mut spec = BoundSpec {
            problem: Problem::Or,
            setting: Setting::FixedAdaptive,
            k: 4,
            p: 0.0,
            delta: 0.1,
        };
        assert!(bound_table(&spec).is_err());
        spec.p = 0.1;
        spec.delta = 0.49;
        assert_eq!(bound_table(&spec), Err(Error::InvalidDelta(0.49)));
    }

    #[test]
    fn all_rows_are_finite() {
        for problem in Problem::ALL {
            for setting in Setting::ALL {
                let v = bound_table(&BoundSpec {
                    problem,
                    setting,
                    k: 16,
                    p: 0.2,
                    delta: 0.05,
                })
                .unwrap();
                assert!(v.lower.is_finite() && v.upper.is_finite() && v.lower > 0.0);
            }
        }
    }

    #[test]
    fn parse_names() {
        assert_eq!("OR".parse::<Problem>().unwrap(), Problem::Or);
        assert_eq!(
            "variable_adaptive".parse::<Setting>().unwrap(),
            Setting::VariableAdaptive
        );
        assert!("median".parse::<Problem>().is_err());
    }

    #[test]
    fn majority_small_cases() {
        // enumeration: n=3 -> 3p^2(1-p) + p^3; n=2 -> 2p(1-p) + p^2 (tie is an error)
        let m = |n| majority_error_exact(n, noise(0.1)).unwrap();
        assert!((m(1) - 0.1).abs() < 1e-15);
        assert!((m(3) - 0.028).abs() < 1e-15);
        assert!((m(2) - 0.19).abs() < 1e-15);
        assert_eq!(
            majority_error_exact(5, NoiseModel::noiseless()).unwrap(),
            0.0
        );
    }

    #[test]
    fn majority_large_n_is_stable() {
        let e = majority_error_exact(100_000, noise(0.45)).unwrap();
        assert!(e > 0.0 && e < 1e-100);
        let e = majority_error_exact(100_001, noise(0.4999)).unwrap();
        assert!((e - 0.4747).abs() < 0.01, "{e}");
    }

    #[test]
    fn majority_monotone() {
        let mut last = 1.0;
        for n in (1..200).step_by(2) {
            let e = majority_error_exact(n, noise(0.3)).unwrap();
            assert!(e <= last);
            last = e;
        }
        let mut last = 0.0;
        for i in 0..50 {
            let e = majority_error_exact(15, noise(i as f64 / 100.0)).unwrap();
            assert!(e >= last);
            last = e;
        }
    }

    #[test]
    fn posterior_loop_single_step() {
        let s = posterior_loop_stats(noise(0.25), delta(0.25));
        assert_eq!(s.barrier, 1);
        assert!((s.error - 0.25).abs() < 1e-15);
        assert!((s.expected_queries - 1.0).abs() < 1e-15);

        let s = posterior_loop_stats(NoiseModel::noiseless(), delta(0.01));
        assert_eq!((s.error, s.expected_queries), (0.0, 1.0));
    }

    #[test]
    fn posterior_loop_guarantee_grid() {
        for pi in 1..50 {
            let p = pi as f64 / 100.0;
            for di in 1..49 {
                let d = di as f64 / 100.0;
                let s = posterior_loop_stats(noise(p), delta(d));
                assert!(s.error <= d * (1.0 + 1e-12), "p={p} d={d} err={}", s.error);
                let claim = (1.0 / d).log2() / kl_flip(p).unwrap() + 1.0 / (1.0 - 2.0 * p);
                assert!(s.expected_queries <= claim, "p={p} d={d}");
            }
        }
    }

    #[test]
    fn rounds() {
        assert_eq!(halving_rounds(1), 0);
        assert_eq!(halving_rounds(2), 1);
        assert_eq!(halving_rounds(3), 2);
        assert_eq!(halving_rounds(64), 6);
        assert_eq!(halving_rounds(65), 7);
    }

    #[test]
    fn tournament_count_single_element() {
        let (n, d) = (noise(0.1), delta(0.1));
        assert_eq!(
            tournament_query_count(1, n, d),
            tournament_final_repetitions(n, d)
        );
        // ceil(6 * log2(10) / (1 - H(0.1))) = ceil(37.53..)
        assert_eq!(tournament_final_repetitions(n, d), 38);
    }

    #[test]
    fn tournament_count_k4_by_hand() {
        // round 1: ceil(4 log2 10 / 0.531004) = 26 per bit, 4 bits
        // round 2: ceil(12 log2 10 / 0.531004) = 76 per bit, 2 bits
        // final:   38
        assert_eq!(
            tournament_query_count(4, noise(0.1), delta(0.1)),
            26 * 4 + 76 * 2 + 38
        );
        assert_eq!(
            max_tournament_query_count(4, noise(0.1), delta(0.1)),
            26 * 2 + 76
        );
    }
}
