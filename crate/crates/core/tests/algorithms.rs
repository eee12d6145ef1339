//! Monte Carlo behaviour of each algorithm against its analytic oracle or
//! its stated error guarantee.

use noisy_compute::adaptive::{self, SearchMode};
use noisy_compute::bounds::{
    majority_error_exact, posterior_loop_stats, posterior_loop_stats_ln, tournament_query_count,
    tournament_round_repetitions,
};
use noisy_compute::harness::{run_trials, AlgorithmId, ExperimentConfig, Family, TrialStats};
use noisy_compute::nonadaptive::{self, or_repetitions, pair_repetitions, search_repetitions};
use noisy_compute::{
    BitInstance, Delta, Instance, NoiseModel, OracleSession, Query, RankInstance, SearchInstance,
};

fn noise(p: f64) -> NoiseModel {
    NoiseModel::new(p).unwrap()
}

fn delta(d: f64) -> Delta {
    Delta::new(d).unwrap()
}

fn config(
    algorithm: AlgorithmId,
    family: Family,
    k: usize,
    p: f64,
    d: f64,
    trials: u64,
) -> ExperimentConfig {
    ExperimentConfig {
        algorithm,
        family,
        k,
        p,
        delta: d,
        trials,
        seed: 2024,
    }
}

/// Error count and mean queries of `trials` runs on one fixed instance.
fn tally<T: PartialEq>(
    instance: impl Into<Instance>,
    p: f64,
    trials: u64,
    truth: T,
    mut run: impl FnMut(&mut OracleSession) -> (T, u64),
) -> (f64, f64) {
    let instance = instance.into();
    let (mut errors, mut queries) = (0u64, 0u64);
    for t in 0..trials {
        let mut session = OracleSession::with_stream(instance.clone(), noise(p), 99, t);
        let (out, q) = run(&mut session);
        errors += (out != truth) as u64;
        queries += q;
    }
    (
        errors as f64 / trials as f64,
        queries as f64 / trials as f64,
    )
}

fn within_sigmas(rate: f64, exact: f64, trials: u64, sigmas: f64) -> bool {
    let sd = (exact * (1.0 - exact) / trials as f64).sqrt();
    (rate - exact).abs() <= sigmas * sd.max(1e-12)
}

fn assert_error_at_most(stats: &TrialStats, bound: f64) {
    assert!(
        stats.wilson95 <= bound,
        "{:?}: worst {} errors {}/{} (wilson {})",
        stats.config.algorithm,
        stats.worst_instance,
        stats.errors,
        stats.trials,
        stats.wilson95
    );
}

#[test]
fn variable_or_single_bit_is_one_posterior_loop() {
    let (p, d) = (0.2, 0.05);
    let exact = posterior_loop_stats(noise(p), delta(d));
    let stats = run_trials(&config(
        AlgorithmId::OrTournamentVariable,
        Family::WorstCaseOr,
        1,
        p,
        d,
        100_000,
    ))
    .unwrap();
    let gap = (stats.queries_mean - exact.expected_queries).abs() / exact.expected_queries;
    assert!(
        gap <= 0.05,
        "mean {} vs {}",
        stats.queries_mean,
        exact.expected_queries
    );
}

#[test]
fn variable_or_error_on_worst_case() {
    let stats = run_trials(&config(
        AlgorithmId::OrTournamentVariable,
        Family::WorstCaseOr,
        8,
        0.2,
        0.05,
        5_000,
    ))
    .unwrap();
    assert_error_at_most(&stats, 0.1);
}

#[test]
fn variable_or_is_cheap_at_low_noise() {
    let (k, p, d) = (16, 0.01, 0.05);
    let stats = run_trials(&config(
        AlgorithmId::OrTournamentVariable,
        Family::WorstCaseOr,
        k,
        p,
        d,
        2_000,
    ))
    .unwrap();
    let fixed = tournament_query_count(k, noise(p), delta(d)) as f64;
    assert!(
        stats.queries_mean * 5.0 < fixed,
        "{} vs {fixed}",
        stats.queries_mean
    );
}

#[test]
fn compare_variable_barrier_of_one() {
    let inst = RankInstance::new(vec![1, 0]).unwrap();
    for seed in 0..50 {
        let mut s = OracleSession::new(inst.clone(), noise(0.25), seed);
        let c = adaptive::compare_variable(&mut s, 0, 1, delta(0.25)).unwrap();
        assert_eq!(c.queries, 1);
    }
}

#[test]
fn compare_variable_matches_exact_error() {
    let (p, d, trials) = (0.3, 0.01, 100_000);
    let exact = posterior_loop_stats(noise(p), delta(d));
    let (rate, mean) = tally(
        RankInstance::new(vec![0, 1]).unwrap(),
        p,
        trials,
        1usize,
        |s| {
            let c = adaptive::compare_variable(s, 0, 1, delta(d)).unwrap();
            (c.winner, c.queries)
        },
    );
    assert!(
        within_sigmas(rate, exact.error, trials, 4.0),
        "{rate} vs {}",
        exact.error
    );
    assert!((mean - exact.expected_queries).abs() / exact.expected_queries <= 0.05);
}

#[test]
fn fixed_max_of_two_is_one_majority_vote() {
    let (p, d, trials) = (0.2, 0.1, 100_000);
    let n = tournament_round_repetitions(1, noise(p), delta(d));
    let exact = majority_error_exact(n, noise(p)).unwrap();
    // Item 1 is the larger; an even split keeps item 0 and errs.
    let (rate, mean) = tally(
        RankInstance::new(vec![0, 1]).unwrap(),
        p,
        trials,
        1usize,
        |s| {
            let r = adaptive::max_tournament_fixed(s, delta(d)).unwrap();
            (r.output, r.queries)
        },
    );
    assert_eq!(mean, n as f64);
    assert!(within_sigmas(rate, exact, trials, 4.0), "{rate} vs {exact}");
}

#[test]
fn fixed_max_error() {
    let stats = run_trials(&config(
        AlgorithmId::MaxTournamentFixed,
        Family::RandomPermutation,
        16,
        0.1,
        0.1,
        20_000,
    ))
    .unwrap();
    assert_error_at_most(&stats, 0.2);
}

#[test]
fn variable_max_of_two_uses_squared_confidence() {
    let (p, d, trials) = (0.3, 0.1, 100_000);
    let exact = posterior_loop_stats_ln(noise(p), 2.0 * f64::ln(d));
    let (rate, mean) = tally(
        RankInstance::new(vec![0, 1]).unwrap(),
        p,
        trials,
        1usize,
        |s| {
            let r = adaptive::max_tournament_variable(s, delta(d)).unwrap();
            (r.output, r.queries)
        },
    );
    assert!(
        within_sigmas(rate, exact.error, trials, 4.0),
        "{rate} vs {}",
        exact.error
    );
    assert!((mean - exact.expected_queries).abs() / exact.expected_queries <= 0.05);
}

#[test]
fn variable_max_error() {
    let stats = run_trials(&config(
        AlgorithmId::MaxTournamentVariable,
        Family::RandomPermutation,
        16,
        0.2,
        0.05,
        10_000,
    ))
    .unwrap();
    assert_error_at_most(&stats, 0.1);
}

#[test]
fn adaptive_search_single_item_is_one_posterior_loop() {
    let (p, d, trials) = (0.2, 0.05, 50_000);
    let exact = posterior_loop_stats(noise(p), delta(d));
    for slot in 0..=1 {
        let (rate, mean) = tally(
            SearchInstance::new(1, slot).unwrap(),
            p,
            trials,
            slot,
            |s| {
                let r = adaptive::search_adaptive(s, delta(d), SearchMode::Variable).unwrap();
                (r.output, r.queries)
            },
        );
        assert!(
            within_sigmas(rate, exact.error, trials, 4.0),
            "{rate} vs {}",
            exact.error
        );
        assert!((mean - exact.expected_queries).abs() / exact.expected_queries <= 0.05);
    }
}

#[test]
fn adaptive_search_error() {
    let stats = run_trials(&config(
        AlgorithmId::SearchAdaptive,
        Family::EachSearchSlot,
        32,
        0.1,
        0.05,
        2_000,
    ))
    .unwrap();
    assert_error_at_most(&stats, 0.05);
}

#[test]
fn fixed_budget_search_spends_it_all() {
    for budget in [1, 5, 40] {
        let mut s = OracleSession::new(SearchInstance::new(10, 4).unwrap(), noise(0.2), 1);
        let r = adaptive::search_adaptive(&mut s, delta(0.1), SearchMode::Fixed(budget)).unwrap();
        assert_eq!(r.queries, budget);
    }
}

#[test]
fn adaptive_sort_of_two() {
    let stats = run_trials(&config(
        AlgorithmId::SortAdaptive,
        Family::RandomPermutation,
        2,
        0.1,
        0.1,
        20_000,
    ))
    .unwrap();
    assert_error_at_most(&stats, 0.05);
}

#[test]
fn nonadaptive_or_single_bit() {
    let (p, d, trials) = (0.2, 0.2, 100_000);
    let r = or_repetitions(1, noise(p), delta(d));
    let exact = majority_error_exact(r, noise(p)).unwrap();
    // On a zero an even split reads as one, which is exactly a tie-as-error vote.
    let (rate, _) = tally(BitInstance::zeros(1).unwrap(), p, trials, false, |s| {
        let out = nonadaptive::or_nonadaptive(s, delta(d)).unwrap();
        (out.output, out.queries)
    });
    assert!(within_sigmas(rate, exact, trials, 4.0), "{rate} vs {exact}");
}

#[test]
fn nonadaptive_or_error_and_union_bound() {
    let (k, p, d) = (32, 0.1, 0.05);
    let stats = run_trials(&config(
        AlgorithmId::OrNonadaptive,
        Family::WorstCaseOr,
        k,
        p,
        d,
        2_000,
    ))
    .unwrap();
    assert_error_at_most(&stats, 0.05);
    let r = or_repetitions(k, noise(p), delta(d));
    let union = k as f64 * majority_error_exact(r, noise(p)).unwrap();
    let slack = 3.0 * (union.min(1.0) * (1.0 - union.min(1.0)) / stats.trials as f64).sqrt();
    assert!(stats.error_rate <= union + slack + 1.0 / stats.trials as f64);
}

#[test]
fn nonadaptive_search_single_item() {
    let (p, d, trials) = (0.3, 0.2, 100_000);
    let t = search_repetitions(noise(p), delta(d));
    let exact = majority_error_exact(t, noise(p)).unwrap();
    // Slot 1: an even split favours slot 0.
    let (rate, _) = tally(SearchInstance::new(1, 1).unwrap(), p, trials, 1usize, |s| {
        let r = nonadaptive::search_nonadaptive(s, delta(d)).unwrap();
        (r.output, r.queries)
    });
    assert!(within_sigmas(rate, exact, trials, 4.0), "{rate} vs {exact}");
}

#[test]
fn nonadaptive_search_estimate_replays_from_counts() {
    let (p, d) = (0.25, 0.1);
    let inst = SearchInstance::new(12, 5).unwrap();
    for seed in 0..20 {
        let mut s = OracleSession::new(inst, noise(p), seed).with_log();
        let out = nonadaptive::search_nonadaptive(&mut s, delta(d))
            .unwrap()
            .output;

        // Same keystream, same schedule: recount the ones per item.
        let log = s.take_log().unwrap();
        let mut replay = OracleSession::new(inst, noise(p), seed);
        let mut ones = vec![0u64; 12];
        for q in log {
            let Query::Target(i) = q else {
                panic!("unexpected {q:?}")
            };
            ones[i] += replay.query_target_comparison(i).unwrap() as u64;
        }
        assert_eq!(
            nonadaptive::search_estimate(&ones, search_repetitions(noise(p), delta(d))),
            out
        );
    }
}

#[test]
fn nonadaptive_search_error() {
    let stats = run_trials(&config(
        AlgorithmId::SearchNonadaptive,
        Family::EachSearchSlot,
        32,
        0.1,
        0.05,
        2_000,
    ))
    .unwrap();
    assert_error_at_most(&stats, 0.1053);
}

#[test]
fn nonadaptive_max_and_sort_of_two() {
    let (p, d, trials) = (0.3, 0.2, 50_000);
    let r = pair_repetitions(2, noise(p), delta(d));
    let exact = majority_error_exact(r, noise(p)).unwrap();
    // Item 0 is the larger; a split falls back to index order and errs.
    let inst = RankInstance::new(vec![1, 0]).unwrap();
    let (rate, _) = tally(inst.clone(), p, trials, 0usize, |s| {
        let out = nonadaptive::max_nonadaptive(s, delta(d)).unwrap();
        (out.output, out.queries)
    });
    assert!(within_sigmas(rate, exact, trials, 4.0), "{rate} vs {exact}");
    let (rate, _) = tally(inst, p, trials, vec![1usize, 0], |s| {
        let out = nonadaptive::sort_nonadaptive(s, delta(d)).unwrap();
        (out.output, out.queries)
    });
    assert!(within_sigmas(rate, exact, trials, 4.0), "{rate} vs {exact}");
}

#[test]
fn nonadaptive_max_error() {
    let stats = run_trials(&config(
        AlgorithmId::MaxNonadaptive,
        Family::RandomPermutation,
        8,
        0.2,
        0.1,
        10_000,
    ))
    .unwrap();
    assert_error_at_most(&stats, 0.1);
}

#[test]
fn relabeling_non_answers_keeps_error_rate() {
    // Maximum fixed at index 3; the other items shuffled.
    let (p, d, trials) = (0.3, 0.3, 40_000);
    let a = RankInstance::new(vec![0, 1, 2, 7, 3, 4, 5, 6]).unwrap();
    let b = RankInstance::new(vec![6, 2, 5, 7, 0, 4, 1, 3]).unwrap();
    let run = |s: &mut OracleSession| {
        let r = adaptive::max_tournament_fixed(s, delta(d)).unwrap();
        (r.output, r.queries)
    };
    let (ra, _) = tally(a, p, trials, 3usize, run);
    let (rb, _) = tally(b, p, trials, 3usize, run);
    let pooled = (ra + rb) / 2.0;
    let sd = (2.0 * pooled * (1.0 - pooled) / trials as f64).sqrt();
    assert!((ra - rb).abs() <= 4.0 * sd.max(1e-9), "{ra} vs {rb}");
}

#[test]
fn smaller_delta_costs_more_and_errs_less() {
    let mut last: Option<TrialStats> = None;
    for d in [0.2, 0.1, 0.05] {
        let stats = run_trials(&config(
            AlgorithmId::OrTournamentVariable,
            Family::WorstCaseOr,
            8,
            0.2,
            d,
            2_000,
        ))
        .unwrap();
        if let Some(prev) = &last {
            let n = (stats.trials * 9) as f64;
            let q_slack = 3.0 * (stats.queries_stddev + prev.queries_stddev) / n.sqrt();
            assert!(stats.queries_mean + q_slack >= prev.queries_mean);
            let e = prev.error_rate;
            let e_slack = 3.0 * (e * (1.0 - e) / stats.trials as f64).sqrt();
            assert!(stats.error_rate <= e + e_slack + 1.0 / stats.trials as f64);
        }
        last = Some(stats);
    }
}
