//! WebAssembly bindings for the static page in `www/`. Every entry point
//! returns a JSON string; the plain `*_json` functions hold the logic so it
//! can be tested natively.

use serde_json::json;
use wasm_bindgen::prelude::*;

use noisy_compute::bounds::{bound_table, posterior_loop_stats, BoundSpec, Problem, Setting};
use noisy_compute::harness::{run_trials, AlgorithmId, ExperimentConfig, Family};
use noisy_compute::{Delta, NoiseModel, Result};

/// Both bound expressions of one table row over an evenly spaced grid of
/// noise levels in `(0, 0.5)`.
pub fn bound_curve_json(
    problem: &str,
    setting: &str,
    k: usize,
    delta: f64,
    points: usize,
) -> Result<String> {
    let problem: Problem = problem.parse()?;
    let setting: Setting = setting.parse()?;
    let points = points.clamp(2, 500);
    let mut p = Vec::with_capacity(points);
    let mut lower = Vec::with_capacity(points);
    let mut upper = Vec::with_capacity(points);
    for i in 0..points {
        // keep clear of both ends, where the expressions blow up
        let x = 0.005 + 0.49 * i as f64 / (points - 1) as f64;
        let v = bound_table(&BoundSpec {
            problem,
            setting,
            k,
            p: x,
            delta,
        })?;
        p.push(x);
        lower.push(v.lower);
        upper.push(v.upper);
    }
    Ok(json!({ "p": p, "lower": lower, "upper": upper }).to_string())
}

pub fn posterior_loop_json(p: f64, delta: f64) -> Result<String> {
    let s = posterior_loop_stats(NoiseModel::new(p)?, Delta::new(delta)?);
    Ok(json!({
        "barrier": s.barrier,
        "error": s.error,
        "expected_queries": s.expected_queries,
    })
    .to_string())
}

pub fn simulate_json(
    algorithm: &str,
    family: &str,
    k: usize,
    p: f64,
    delta: f64,
    trials: u64,
    seed: u64,
) -> Result<String> {
    let config = ExperimentConfig {
        algorithm: algorithm.parse::<AlgorithmId>()?,
        family: family.parse::<Family>()?,
        k,
        p,
        delta,
        // the page runs on the UI thread
        trials: trials.min(20_000),
        seed,
    };
    let s = run_trials(&config)?;
    Ok(json!({
        "trials": s.trials,
        "errors": s.errors,
        "error_rate": s.error_rate,
        "wilson95": s.wilson95,
        "queries_mean": s.queries_mean,
        "queries_min": s.queries_min,
        "queries_max": s.queries_max,
        "queries_stddev": s.queries_stddev,
        "worst_instance": s.worst_instance,
    })
    .to_string())
}

fn to_js(r: Result<String>) -> std::result::Result<String, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = boundCurve)]
pub fn bound_curve(
    problem: &str,
    setting: &str,
    k: usize,
    delta: f64,
    points: usize,
) -> std::result::Result<String, JsError> {
    to_js(bound_curve_json(problem, setting, k, delta, points))
}

#[wasm_bindgen(js_name = posteriorLoop)]
pub fn posterior_loop(p: f64, delta: f64) -> std::result::Result<String, JsError> {
    to_js(posterior_loop_json(p, delta))
}

#[wasm_bindgen]
pub fn simulate(
    algorithm: &str,
    family: &str,
    k: usize,
    p: f64,
    delta: f64,
    trials: u32,
    seed: u32,
) -> std::result::Result<String, JsError> {
    to_js(simulate_json(
        algorithm,
        family,
        k,
        p,
        delta,
        trials as u64,
        seed as u64,
    ))
}
