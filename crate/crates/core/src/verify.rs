//! Acceptance checks. Each numbered criterion returns one or more
//! [`CheckReport`]s carrying the measured value, the threshold it is held
//! to, and the verdict.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::adaptive::{self, posterior_update, SearchMode};
use crate::bounds::{
    binary_entropy, kl_flip, majority_error_exact, tournament_query_count, walk_stats,
};
use crate::channel::{Delta, NoiseModel};
use crate::error::{Error, Result};
use crate::harness::{run_once, run_trials, sweep, to_csv, AlgorithmId, ExperimentConfig, Family};
use crate::instance::{BitInstance, Instance, RankInstance, SearchInstance};
use crate::nonadaptive;
use crate::oracle::{OracleSession, Query};
use crate::reference;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub criterion_id: String,
    pub claim: String,
    pub measured: f64,
    /// `None` for purely informational rows.
    pub threshold: Option<f64>,
    pub pass: bool,
}

impl CheckReport {
    fn at_most(
        id: impl Into<String>,
        claim: impl Into<String>,
        measured: f64,
        threshold: f64,
    ) -> Self {
        Self {
            criterion_id: id.into(),
            claim: claim.into(),
            measured,
            threshold: Some(threshold),
            pass: measured <= threshold,
        }
    }

    fn at_least(
        id: impl Into<String>,
        claim: impl Into<String>,
        measured: f64,
        threshold: f64,
    ) -> Self {
        Self {
            criterion_id: id.into(),
            claim: claim.into(),
            measured,
            threshold: Some(threshold),
            pass: measured >= threshold,
        }
    }

    fn info(id: impl Into<String>, claim: impl Into<String>, measured: f64) -> Self {
        Self {
            criterion_id: id.into(),
            claim: claim.into(),
            measured,
            threshold: None,
            pass: true,
        }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        match self.threshold {
            Some(t) => write!(
                f,
                "[{verdict}] {} {}: measured {:?} vs threshold {:?}",
                self.criterion_id, self.claim, self.measured, t
            ),
            None => write!(
                f,
                "[{verdict}] {} {}: {:?}",
                self.criterion_id, self.claim, self.measured
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    ExactOracles,
    Guarantees,
    Invariants,
    All,
}

impl Suite {
    pub fn criteria(self) -> &'static [u8] {
        match self {
            Suite::ExactOracles => &[2, 4, 7],
            Suite::Guarantees => &[1, 3, 5, 6, 9],
            Suite::Invariants => &[8],
            Suite::All => &[1, 2, 3, 4, 5, 6, 7, 8, 9],
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact_oracles" => Ok(Suite::ExactOracles),
            "guarantees" => Ok(Suite::Guarantees),
            "invariants" => Ok(Suite::Invariants),
            "all" => Ok(Suite::All),
            _ => Err(Error::Config(format!(
                "unknown suite '{s}' (exact_oracles|guarantees|invariants|all)"
            ))),
        }
    }
}

/// Knobs for the checker itself, never for the algorithms under test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Multiplies the confidence target in every guarantee threshold.
    /// Values below 1 make the checker stricter than the guarantees; used as
    /// a negative control.
    pub delta_scale: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { delta_scale: 1.0 }
    }
}

pub fn run_suite(suite: Suite, options: VerifyOptions) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for &id in suite.criteria() {
        out.extend(criterion(id, options)?);
    }
    Ok(out)
}

pub fn all_pass(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.pass)
}

pub fn to_json(reports: &[CheckReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize")
}

pub fn criterion(id: u8, options: VerifyOptions) -> Result<Vec<CheckReport>> {
    match id {
        1 => tournament_guarantee(options),
        2 => tournament_query_accounting(),
        3 => comparison_oracle(options),
        4 => exact_oracle_equivalence(),
        5 => nonadaptive_search(options),
        6 => variable_length_scaling(),
        7 => noiseless_exhaustive(),
        8 => property_suites(),
        9 => sort_guarantees(options),
        _ => Err(Error::Config(format!("no acceptance criterion {id}"))),
    }
}

fn noise(p: f64) -> NoiseModel {
    NoiseModel::new(p).expect("grid noise is valid")
}

fn delta(d: f64) -> Delta {
    Delta::new(d).expect("grid delta is valid")
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, Duration)> {
    let start = Instant::now();
    let out = f()?;
    Ok((out, start.elapsed()))
}

/// Fixed-length OR tournament errs with probability at most `2 delta` on
/// every worst-case instance.
fn tournament_guarantee(options: VerifyOptions) -> Result<Vec<CheckReport>> {
    let config = ExperimentConfig {
        algorithm: AlgorithmId::OrTournamentFixed,
        family: Family::WorstCaseOr,
        k: 64,
        p: 0.1,
        delta: 0.1,
        trials: 20_000,
        seed: 1,
    };
    let (stats, elapsed) = timed(|| run_trials(&config))?;
    Ok(vec![
        CheckReport::at_most(
            "C1",
            format!(
                "or_tournament_fixed K=64 p=0.1 delta=0.1: worst-instance ({}) Wilson-95 error <= 2*delta",
                stats.worst_instance
            ),
            stats.wilson95,
            2.0 * 0.1 * options.delta_scale,
        ),
        CheckReport::at_most("C1.runtime", "C1 wall time in seconds < 120", elapsed.as_secs_f64(), 120.0),
    ])
}

/// The query counter of a real run equals the closed-form total.
fn tournament_query_accounting() -> Result<Vec<CheckReport>> {
    let mut mismatches = 0u64;
    let mut dry_mismatches = 0u64;
    let mut runs = 0u64;
    for p in [0.05, 0.1, 0.25, 0.4] {
        for d in [0.2, 0.1, 0.01] {
            let (n, dl) = (noise(p), delta(d));
            for k in 1..=128usize {
                let mut session =
                    OracleSession::new(BitInstance::single_one(k, k / 2)?, n, k as u64);
                let result = adaptive::or_tournament_fixed(&mut session, dl)?;
                let formula = tournament_query_count(k, n, dl);
                mismatches +=
                    (result.queries != formula || session.queries_used() != formula) as u64;
                let dry = reference::bracket_query_count(
                    k,
                    |i| crate::bounds::tournament_round_repetitions(i, n, dl),
                    crate::bounds::tournament_final_repetitions(n, dl),
                );
                dry_mismatches += (dry != formula) as u64;
                runs += 1;
            }
        }
    }
    Ok(vec![
        CheckReport::at_most(
            "C2",
            format!("or_tournament_fixed runs whose counter differs from tournament_query_count, of {runs} (K, p, delta) points"),
            mismatches as f64,
            0.0,
        ),
        CheckReport::at_most(
            "C2.dry_run",
            "bracket replays whose count differs from tournament_query_count",
            dry_mismatches as f64,
            0.0,
        ),
    ])
}

/// Variable-length comparison: error at most delta, mean length matching
/// the gambler's-ruin analysis and below the expectation bound.
fn comparison_oracle(options: VerifyOptions) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for p in [0.1, 0.3, 0.45] {
        for d in [0.1, 0.01] {
            let config = ExperimentConfig {
                algorithm: AlgorithmId::CompareVariable,
                family: Family::RandomPermutation,
                k: 2,
                p,
                delta: d,
                trials: 100_000,
                seed: 3,
            };
            let stats = run_trials(&config)?;
            let exact = crate::bounds::posterior_loop_stats(noise(p), delta(d));
            let tag = format!("C3[p={p},delta={d}]");
            out.push(CheckReport::at_most(
                format!("{tag}.error"),
                format!(
                    "compare_variable Wilson-95 error <= delta (errors {}/{}, exact {:.6})",
                    stats.errors, stats.trials, exact.error
                ),
                stats.wilson95,
                d * options.delta_scale,
            ));
            out.push(CheckReport::at_most(
                format!("{tag}.mean"),
                format!(
                    "relative gap of mean queries {:.4} to exact {:.4}",
                    stats.queries_mean, exact.expected_queries
                ),
                (stats.queries_mean - exact.expected_queries).abs() / exact.expected_queries,
                0.05,
            ));
            let claim = (1.0 / d).log2() / kl_flip(p)? + 1.0 / (1.0 - 2.0 * p);
            out.push(CheckReport::at_most(
                format!("{tag}.bound"),
                "mean queries <= log2(1/delta)/D_KL(p||1-p) + 1/(1-2p)",
                stats.queries_mean,
                claim,
            ));
        }
    }
    Ok(out)
}

/// Closed forms against independent computations.
fn exact_oracle_equivalence() -> Result<Vec<CheckReport>> {
    let mut err_gap = 0.0f64;
    let mut time_gap = 0.0f64;
    for p in [0.05, 0.1, 0.2, 0.3, 0.4, 0.45, 0.49] {
        for m in 1..=64 {
            let closed = walk_stats(noise(p), m);
            let (ruin, time) = reference::walk_by_transition_matrix(noise(p), m);
            err_gap = err_gap.max((closed.error - ruin).abs());
            time_gap = time_gap
                .max((closed.expected_queries - time).abs() / closed.expected_queries.max(1.0));
        }
    }

    let mut worst_sigma = 0.0f64;
    let samples = 1_000_000u64;
    for (i, n) in [1u64, 3, 7, 15, 101].into_iter().enumerate() {
        for (j, p) in [0.05, 0.1, 0.3].into_iter().enumerate() {
            let exact = majority_error_exact(n, noise(p))?;
            let mc =
                reference::majority_error_by_simulation(n, noise(p), samples, (10 * i + j) as u64);
            let sigma = (exact * (1.0 - exact) / samples as f64).sqrt();
            let z = if sigma > 0.0 {
                (mc - exact).abs() / sigma
            } else {
                (mc - exact).abs() * 1e300
            };
            worst_sigma = worst_sigma.max(z);
        }
    }
    Ok(vec![
        CheckReport::at_most(
            "C4.ruin",
            "max |closed-form ruin - transition-matrix ruin| over barriers 1..=64",
            err_gap,
            1e-10,
        ),
        CheckReport::at_most(
            "C4.duration",
            "max relative gap of closed-form vs transition-matrix expected duration",
            time_gap,
            1e-10,
        ),
        CheckReport::at_most(
            "C4.majority",
            "max |Monte Carlo - exact| majority error in standard deviations (1e6 samples)",
            worst_sigma,
            3.0,
        ),
    ])
}

/// Non-adaptive SEARCH errs with probability below `2 delta / (1 - delta)`
/// at every slot.
fn nonadaptive_search(options: VerifyOptions) -> Result<Vec<CheckReport>> {
    let config = ExperimentConfig {
        algorithm: AlgorithmId::SearchNonadaptive,
        family: Family::EachSearchSlot,
        k: 32,
        p: 0.1,
        delta: 0.05,
        trials: 20_000,
        seed: 5,
    };
    let stats = run_trials(&config)?;
    let d = 0.05 * options.delta_scale;
    Ok(vec![CheckReport::at_most(
        "C5",
        format!(
            "search_nonadaptive K=32 p=0.1 delta=0.05: worst slot ({}) Wilson-95 error <= 2*delta/(1-delta)",
            stats.worst_instance
        ),
        stats.wilson95,
        2.0 * d / (1.0 - d),
    )])
}

/// Mean queries of the variable-length OR tournament, measured over the
/// worst-case family, divided by the order expression. Returns
/// `(K, p, delta, ratio)` for each grid point.
pub fn variable_or_ratios(trials: u64) -> Result<Vec<(usize, f64, f64, f64)>> {
    let mut out = Vec::new();
    for k in [4usize, 16, 64] {
        for p in [0.1, 0.3] {
            for d in [0.1, 0.01] {
                let config = ExperimentConfig {
                    algorithm: AlgorithmId::OrTournamentVariable,
                    family: Family::WorstCaseOr,
                    k,
                    p,
                    delta: d,
                    trials,
                    seed: 6,
                };
                let stats = run_trials(&config)?;
                let kf = k as f64;
                let expr = kf / (1.0 - binary_entropy(p)?) + kf * (1.0 / d).log2() / kl_flip(p)?;
                out.push((k, p, d, stats.queries_mean / expr));
            }
        }
    }
    Ok(out)
}

/// Constant-stability of the variable-length OR tournament.
fn variable_length_scaling() -> Result<Vec<CheckReport>> {
    let ratios = variable_or_ratios(400)?;
    let log_mean = ratios.iter().map(|r| r.3.ln()).sum::<f64>() / ratios.len() as f64;
    let fitted = log_mean.exp();
    let lo = ratios
        .iter()
        .map(|r| r.3 / fitted)
        .fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().map(|r| r.3 / fitted).fold(0.0, f64::max);
    Ok(vec![
        CheckReport::info(
            "C6.fitted_constant",
            "fitted C in E[queries] ~ C (K/(1-H(p)) + K log2(1/delta)/D_KL(p||1-p))",
            fitted,
        ),
        CheckReport::at_least(
            "C6.min_ratio",
            "smallest (measured / expression) / C",
            lo,
            0.5,
        ),
        CheckReport::at_most(
            "C6.max_ratio",
            "largest (measured / expression) / C",
            hi,
            2.0,
        ),
    ])
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for perm in permutations(k - 1) {
        for pos in 0..=perm.len() {
            let mut next = perm.clone();
            next.insert(pos, k - 1);
            out.push(next);
        }
    }
    out
}

/// At `p = 0` every algorithm is exact on every small instance.
fn noiseless_exhaustive() -> Result<Vec<CheckReport>> {
    let d = delta(0.1);
    let clean = NoiseModel::noiseless();
    let mut wrong = 0u64;
    let mut runs = 0u64;
    let mut check = |algorithm: AlgorithmId, instance: Instance| -> Result<()> {
        let mut session = OracleSession::new(instance, clean, 0);
        let (correct, _) = run_once(algorithm, &mut session, d)?;
        wrong += !correct as u64;
        runs += 1;
        Ok(())
    };
    for k in 1..=8usize {
        for mask in 0u32..(1 << k) {
            let bits = BitInstance::new((0..k).map(|i| mask >> i & 1 == 1).collect())?;
            for alg in [
                AlgorithmId::OrTournamentFixed,
                AlgorithmId::OrTournamentVariable,
                AlgorithmId::OrNonadaptive,
            ] {
                check(alg, bits.clone().into())?;
            }
        }
    }
    for k in 1..=5usize {
        for ranks in permutations(k) {
            let inst = RankInstance::new(ranks)?;
            for alg in [
                AlgorithmId::MaxTournamentFixed,
                AlgorithmId::MaxTournamentVariable,
                AlgorithmId::MaxNonadaptive,
                AlgorithmId::SortAdaptive,
                AlgorithmId::SortNonadaptive,
            ] {
                check(alg, inst.clone().into())?;
            }
            if k == 2 {
                check(AlgorithmId::CompareVariable, inst.clone().into())?;
            }
        }
    }
    for k in 1..=16usize {
        for slot in 0..=k {
            let inst = SearchInstance::new(k, slot)?;
            for alg in [AlgorithmId::SearchAdaptive, AlgorithmId::SearchNonadaptive] {
                check(alg, inst.into())?;
            }
        }
    }
    Ok(vec![CheckReport::at_most(
        "C7",
        format!("wrong outputs at p=0 over {runs} exhaustive runs"),
        wrong as f64,
        0.0,
    )])
}

/// Schedules of every non-adaptive algorithm on several instances and
/// seeds; returns the number that differ from the first.
pub fn nonadaptive_schedule_mismatches() -> Result<u64> {
    let n = noise(0.2);
    let d = delta(0.1);
    let mut differing = 0;
    let schedule = |instance: Instance,
                    seed: u64,
                    run: &dyn Fn(&mut OracleSession) -> Result<()>|
     -> Result<Vec<Query>> {
        let mut session = OracleSession::new(instance, n, seed).with_log();
        run(&mut session)?;
        Ok(session.take_log().unwrap_or_default())
    };
    type Runner = Box<dyn Fn(&mut OracleSession) -> Result<()>>;
    let cases: Vec<(Vec<Instance>, Runner)> = vec![
        (
            vec![
                BitInstance::zeros(6)?.into(),
                BitInstance::single_one(6, 2)?.into(),
                BitInstance::new(vec![true; 6])?.into(),
            ],
            Box::new(move |s| nonadaptive::or_nonadaptive(s, d).map(|_| ())),
        ),
        (
            vec![
                SearchInstance::new(6, 0)?.into(),
                SearchInstance::new(6, 3)?.into(),
                SearchInstance::new(6, 6)?.into(),
            ],
            Box::new(move |s| nonadaptive::search_nonadaptive(s, d).map(|_| ())),
        ),
        (
            vec![
                RankInstance::identity(5)?.into(),
                RankInstance::new(vec![4, 2, 0, 1, 3])?.into(),
                RankInstance::new(vec![1, 0, 4, 3, 2])?.into(),
            ],
            Box::new(move |s| nonadaptive::max_nonadaptive(s, d).map(|_| ())),
        ),
        (
            vec![
                RankInstance::identity(5)?.into(),
                RankInstance::new(vec![4, 2, 0, 1, 3])?.into(),
                RankInstance::new(vec![1, 0, 4, 3, 2])?.into(),
            ],
            Box::new(move |s| nonadaptive::sort_nonadaptive(s, d).map(|_| ())),
        ),
    ];
    for (instances, run) in &cases {
        let reference = schedule(instances[0].clone(), 0, run.as_ref())?;
        for (i, inst) in instances.iter().enumerate() {
            for seed in [1u64, 77, 12_345] {
                if schedule(inst.clone(), seed + i as u64, run.as_ref())? != reference {
                    differing += 1;
                }
            }
        }
    }
    Ok(differing)
}

fn property_suites() -> Result<Vec<CheckReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut round_trip = 0.0f64;
    for _ in 0..10_000 {
        let a: f64 = rng.random_range(0.001..0.999);
        let p: f64 = rng.random_range(0.001..0.499);
        let n = noise(p);
        let back = posterior_update(posterior_update(a, true, n)?, false, n)?;
        round_trip = round_trip.max((back - a).abs());
    }

    let mut kl_violations = 0u64;
    let mut bracket_violations = 0u64;
    for i in 0..1000 {
        // kl grid on (0, 1/2), capacity-ratio grid on [0, 1] minus 1/2
        let p = (i as f64 + 0.5) / 2000.0;
        if kl_flip(p)? < 1.0 - binary_entropy(p)? {
            kl_violations += 1;
        }
        let q = i as f64 / 999.0;
        if (q - 0.5).abs() > 1e-12 {
            let ratio = (0.5 - q).powi(2) / (1.0 - binary_entropy(q)?);
            if !(0.25 - 1e-12..=0.5 + 1e-12).contains(&ratio) {
                bracket_violations += 1;
            }
        }
    }

    let schedule_mismatches = nonadaptive_schedule_mismatches()?;

    let grid = [
        ExperimentConfig {
            algorithm: AlgorithmId::OrTournamentVariable,
            family: Family::WorstCaseOr,
            k: 8,
            p: 0.2,
            delta: 0.05,
            trials: 200,
            seed: 11,
        },
        ExperimentConfig {
            algorithm: AlgorithmId::SortAdaptive,
            family: Family::RandomPermutation,
            k: 6,
            p: 0.1,
            delta: 0.1,
            trials: 200,
            seed: 12,
        },
    ];
    let first = to_csv(&sweep(&grid)?);
    let second = to_csv(&sweep(&grid)?);

    Ok(vec![
        CheckReport::at_most(
            "C8.round_trip",
            "max |update(update(a,1),0) - a| over 1e4 random (a, p)",
            round_trip,
            1e-12,
        ),
        CheckReport::at_most(
            "C8.kl_capacity",
            "grid points with D_KL(p||1-p) < 1 - H(p)",
            kl_violations as f64,
            0.0,
        ),
        CheckReport::at_most(
            "C8.capacity_ratio",
            "grid points with (1/2-p)^2/(1-H(p)) outside [1/4, 1/2]",
            bracket_violations as f64,
            0.0,
        ),
        CheckReport::at_most(
            "C8.nonadaptive_audit",
            "non-adaptive schedules differing across instances and seeds",
            schedule_mismatches as f64,
            0.0,
        ),
        CheckReport::at_least(
            "C8.determinism",
            "repeated sweep produces byte-identical CSV (1 = identical)",
            (first == second) as u8 as f64,
            1.0,
        ),
    ])
}

fn sort_guarantees(options: VerifyOptions) -> Result<Vec<CheckReport>> {
    let start = Instant::now();
    let adaptive_stats = run_trials(&ExperimentConfig {
        algorithm: AlgorithmId::SortAdaptive,
        family: Family::RandomPermutation,
        k: 16,
        p: 0.1,
        delta: 0.1,
        trials: 10_000,
        seed: 9,
    })?;
    let nonadaptive_stats = run_trials(&ExperimentConfig {
        algorithm: AlgorithmId::SortNonadaptive,
        family: Family::RandomPermutation,
        k: 8,
        p: 0.1,
        delta: 0.1,
        trials: 10_000,
        seed: 10,
    })?;
    let elapsed = start.elapsed().as_secs_f64();
    let threshold = 0.1 * options.delta_scale;
    Ok(vec![
        CheckReport::at_most(
            "C9.adaptive",
            format!(
                "sort_adaptive K=16 p=0.1 delta=0.1 Wilson-95 error <= delta (errors {}/{})",
                adaptive_stats.errors, adaptive_stats.trials
            ),
            adaptive_stats.wilson95,
            threshold,
        ),
        CheckReport::at_most(
            "C9.nonadaptive",
            format!(
                "sort_nonadaptive K=8 p=0.1 delta=0.1 Wilson-95 error <= delta (errors {}/{})",
                nonadaptive_stats.errors, nonadaptive_stats.trials
            ),
            nonadaptive_stats.wilson95,
            threshold,
        ),
        CheckReport::at_most(
            "C9.runtime",
            "combined wall time in seconds < 300",
            elapsed,
            300.0,
        ),
    ])
}

/// Fixed-mode search spends its budget exactly; exposed for the demo and
/// CLI rather than as an acceptance criterion.
pub fn search_fixed_budget_holds(k: usize, slot: usize, budget: u64, p: f64) -> Result<bool> {
    let mut session = OracleSession::new(SearchInstance::new(k, slot)?, NoiseModel::new(p)?, 0);
    let r = adaptive::search_adaptive(&mut session, delta(0.1), SearchMode::Fixed(budget))?;
    Ok(r.queries == budget)
}
