use std::process::{Command, Output};

use rove_cover::{CoverageDistribution, Rational};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rove-cover"))
        .args(args)
        .env_remove("ROVE_COVER_BUDGET")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn rational(v: &Value) -> Rational {
    serde_json::from_value(v.clone()).unwrap()
}

#[test]
fn dist_subset_example() {
    let v = json(&["dist", "--scheme", "subset", "--n", "4", "--m", "2", "--k", "2", "--format", "json"]);
    assert_eq!(v["command"], "dist");
    assert_eq!(v["format_version"], "1.0.0");
    let dist: CoverageDistribution = serde_json::from_value(v["result"].clone()).unwrap();
    assert_eq!(dist.pmf(2), Rational::new(1, 6));
    assert_eq!(dist.pmf(3), Rational::new(2, 3));
    assert_eq!(dist.pmf(4), Rational::new(1, 6));
    let ts: Vec<u64> = v["result"]["pmf"].as_array().unwrap().iter().map(|e| e["t"].as_u64().unwrap()).collect();
    assert_eq!(ts, vec![2, 3, 4]);
}

#[test]
fn dist_single_point_and_csv() {
    let v = json(&["dist", "--scheme", "multinomial", "--n", "4", "--m", "2", "--k", "1", "--t", "2"]);
    assert_eq!(rational(&v["result"]["probability"]), Rational::new(3, 4));

    let out = run(&["dist", "--n", "4", "--m", "2", "--k", "2", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,num,den,approx"));
    assert_eq!(lines.next(), Some("2,1,6,0.16666666666666666"));
}

#[test]
fn stirling_example() {
    let v = json(&["stirling", "--N", "3", "--K", "2"]);
    assert_eq!(v["result"]["value"], "3");
    assert_eq!(run(&["stirling", "--N", "0", "--K", "2"]).status.code(), Some(2));
}

#[test]
fn mean_tail_bounds_theorem2() {
    let v = json(&["mean", "--n", "10", "--m", "3", "--k", "2"]);
    assert_eq!(rational(&v["result"]["mean"]), Rational::new(51, 10));

    let v = json(&["tail", "--n", "4", "--m", "2", "--k", "2", "--tau", "4"]);
    assert_eq!(rational(&v["result"]["probability"]), Rational::new(1, 6));
    let v = json(&["tail", "--n", "4", "--m", "2", "--k", "2", "--tau", "-1"]);
    assert_eq!(rational(&v["result"]["probability"]), Rational::one());

    let v = json(&["bounds", "--n", "10", "--m", "10", "--k", "1"]);
    assert_eq!(rational(&v["result"]["single_stage_markov_bound"]), Rational::one());
    assert_eq!(v["result"]["single_stage_clamped"], true);

    let v = json(&["theorem2", "--n", "4", "--m", "2", "--k", "2"]);
    assert_eq!(v["result"]["all_hold"], true);
    let out = run(&["theorem2", "--n", "3", "--m", "3", "--k", "1", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("3,2,9,"));
}

#[test]
fn enumerate_and_budget_refusal() {
    let v = json(&["enumerate", "--scheme", "subset", "--n", "4", "--m", "2", "--k", "2"]);
    assert_eq!(v["result"]["total_outcomes"], "36");

    let out = run(&["enumerate", "--scheme", "subset", "--n", "50", "--m", "10", "--k", "5"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");

    let out = run(&["enumerate", "--n", "4", "--m", "2", "--k", "2", "--budget", "10"]);
    assert_eq!(out.status.code(), Some(3));

    let out = Command::new(env!("CARGO_BIN_EXE_rove-cover"))
        .args(["enumerate", "--n", "4", "--m", "2", "--k", "2"])
        .env("ROVE_COVER_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn crosscheck_rejects_small_k_and_reports_agreement() {
    assert_eq!(run(&["crosscheck", "--n", "4", "--m", "2", "--k", "3"]).status.code(), Some(2));
    let v = json(&["crosscheck", "--n", "6", "--m", "2", "--k", "4"]);
    assert_eq!(v["result"]["agree"], true);
    assert_eq!(v["result"]["enumeration"]["closed_form_agrees"], true);
    assert_eq!(run(&["crosscheck", "--n", "40", "--m", "20", "--k", "9"]).status.code(), Some(3));
}

#[test]
fn validation_errors_exit_two_with_one_line() {
    for args in [
        &["dist", "--n", "4", "--m", "5", "--k", "2"][..],
        &["dist", "--n", "4", "--m", "2", "--k", "2", "--bogus"],
        &["dist", "--n", "four", "--m", "2", "--k", "2"],
        &["frobnicate"],
        &["mean", "--n", "4", "--m", "2", "--k", "2", "--format", "csv"],
        &["plan", "--n", "4", "--m", "2", "--alpha", "1"],
        &["plan", "--n", "4", "--m", "2", "--alpha", "x/y"],
        &["simulate", "--n", "4", "--m", "2", "--k", "2", "--trials", "0"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert_eq!(err.trim_end().lines().count(), 1, "{args:?}: {err}");
        assert!(!err.contains("panicked"));
    }
}

#[test]
fn plan_outputs() {
    let v = json(&["plan", "--n", "4", "--m", "2", "--tau", "4", "--p", "1/6"]);
    assert_eq!(v["result"]["k"], 2);
    assert_eq!(v["result"]["verified_at_k_minus_1"], true);
    let v = json(&["plan", "--n", "10", "--m", "3", "--alpha", "0.9"]);
    assert_eq!(v["result"]["k"], 7);
    let v = json(&["plan", "--n", "4", "--m", "2", "--tau", "4", "--p", "1", "--k-max", "20"]);
    assert_eq!(v["result"]["cap_exceeded"], true);
    assert!(v["result"]["k"].is_null());
    assert!(rational(&v["result"]["achieved"]) < 1u64);
}

#[test]
fn simulate_and_compare() {
    let args = ["--n", "6", "--m", "2", "--k", "3", "--trials", "20000", "--seed", "3"];
    let sim = json(&[&["simulate", "--scheme", "multinomial"][..], &args].concat());
    let counts = sim["result"]["counts"].as_array().unwrap();
    let total: u64 = counts.iter().map(|c| c["count"].as_u64().unwrap()).sum();
    assert_eq!(total, 20000);
    assert_eq!(counts[0]["t"], 1);
    assert!(sim["result"]["repetition_event_count"].as_u64().is_some());

    let cmp = json(&[&["compare"][..], &args].concat());
    assert!(cmp["result"]["total_variation_distance"].as_f64().unwrap() < 0.05);

    let out = run(&[&["simulate", "--format", "csv"][..], &args].concat());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("t,count,frequency"));
    assert!(text.lines().nth(1).unwrap().starts_with("2,"));
}
