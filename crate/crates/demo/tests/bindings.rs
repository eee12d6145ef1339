use noisy_compute_demo::{bound_curve_json, posterior_loop_json, simulate_json};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn curve_has_requested_points() {
    let v = parse(&bound_curve_json("or", "fixed_adaptive", 16, 0.1, 25).unwrap());
    for key in ["p", "lower", "upper"] {
        assert_eq!(v[key].as_array().unwrap().len(), 25);
    }
    // harder channels need more queries
    let upper = v["upper"].as_array().unwrap();
    assert!(upper[24].as_f64().unwrap() > upper[0].as_f64().unwrap());
    assert!(bound_curve_json("xor", "fixed_adaptive", 16, 0.1, 25).is_err());
    assert!(bound_curve_json("or", "fixed_adaptive", 16, 0.6, 25).is_err());
}

#[test]
fn posterior_loop_barrier_of_one() {
    let v = parse(&posterior_loop_json(0.25, 0.25).unwrap());
    assert_eq!(v["barrier"], 1);
    assert_eq!(v["expected_queries"], 1.0);
    assert!((v["error"].as_f64().unwrap() - 0.25).abs() < 1e-12);
}

#[test]
fn simulate_runs_serially() {
    let v =
        parse(&simulate_json("search_adaptive", "each_search_slot", 8, 0.0, 0.1, 50, 1).unwrap());
    assert_eq!(v["errors"], 0);
    assert_eq!(v["trials"], 50);
    assert!(simulate_json("sort_adaptive", "worst_case_or", 8, 0.1, 0.1, 50, 1).is_err());
}
