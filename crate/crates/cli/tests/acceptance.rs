//! Release gate: every acceptance criterion, one pass/fail line each.
//!
//! Run with `cargo test -p rove-cover-cli --test acceptance -- --nocapture`
//! to see the report.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rove_cover::combinatorics::{binomial, factorial, stirling2};
use rove_cover::monte_carlo::{compare, simulate, SimulationConfig};
use rove_cover::multinomial::{
    all_distinct_probability, multinomial_coverage_pmf, r_count, repetition_mean, theorem2_check,
};
use rove_cover::oracle::{enumerate_multinomial_scheme, enumerate_subset_scheme, DEFAULT_BUDGET};
use rove_cover::planner::{min_agents_confident, min_agents_expected, PlanQuery, Target, DEFAULT_K_MAX};
use rove_cover::subset::{coverage_pmf, coverage_pmf_nested, mean_coverage, mean_coverage_closed_form};
use rove_cover::{Params, Rational, Scheme};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rove-cover"))
}

fn params(n: u32, m: u32, k: u32) -> Params {
    Params::new(n, m, k).unwrap()
}

fn within(limit: Duration, start: Instant) -> Result<Duration, String> {
    let elapsed = start.elapsed();
    if elapsed > limit {
        Err(format!("took {elapsed:?}, limit {limit:?}"))
    } else {
        Ok(elapsed)
    }
}

fn subset_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for n in 1..=6 {
        for m in 1..=3.min(n) {
            for k in 1..=3 {
                let p = params(n, m, k);
                let oracle = enumerate_subset_scheme(&p, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
                if coverage_pmf(&p) != oracle.distribution() {
                    return Err(format!("mismatch at {p}"));
                }
                checked += 1;
            }
        }
    }
    let elapsed = within(Duration::from_secs(30), start)?;
    Ok(format!("{checked} parameter sets exact, {elapsed:?}"))
}

fn nested_vs_closed_form() -> Outcome {
    let start = Instant::now();
    let mut agreeing = 0;
    let mut reported = 0;
    for n in 5..=8 {
        for m in 1..=2 {
            let p = params(n, m, 4);
            let closed = coverage_pmf(&p);
            let nested = coverage_pmf_nested(&p, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
            let differing: BTreeSet<u32> = (1..=n).filter(|&t| closed.pmf(t) != nested.pmf(t)).collect();

            let out = bin()
                .args(["crosscheck", "--n", &n.to_string(), "--m", &m.to_string(), "--k", "4"])
                .output()
                .map_err(|e| e.to_string())?;
            if !out.status.success() {
                return Err(format!("crosscheck failed for {p}: {}", String::from_utf8_lossy(&out.stderr)));
            }
            let report: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
            let result = &report["result"];
            let listed: BTreeSet<u32> = result["discrepancies"]
                .as_array()
                .ok_or("missing discrepancies")?
                .iter()
                .map(|d| d["t"].as_u64().unwrap() as u32)
                .collect();
            if result["agree"].as_bool() != Some(differing.is_empty()) || listed != differing {
                return Err(format!("silent or incomplete disagreement at {p}"));
            }
            if differing.is_empty() {
                agreeing += 1;
            } else {
                reported += 1;
            }
        }
    }
    let elapsed = within(Duration::from_secs(60), start)?;
    Ok(format!("{agreeing} identical, {reported} reported with discrepancies, {elapsed:?}"))
}

fn stirling_identity() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for len in 1..=20u32 {
        for m in (1..=len).filter(|m| len % m == 0) {
            let k = len / m;
            for t in 1..=len {
                let lhs = r_count(k, m, t);
                let rhs = factorial(t as u64) * stirling2(len, t);
                if lhs != rhs {
                    return Err(format!("R({k},{m},{t}) = {lhs} but t! S = {rhs}"));
                }
                checked += 1;
            }
        }
    }
    let elapsed = within(Duration::from_secs(10), start)?;
    Ok(format!("{checked} (k, m, t) triples exact, {elapsed:?}"))
}

fn normalization() -> Outcome {
    let mut checked = 0;
    for n in 1..=12 {
        for m in 1..=4.min(n) {
            for k in 1..=4 {
                let p = params(n, m, k);
                for dist in [coverage_pmf(&p), multinomial_coverage_pmf(&p)] {
                    if !dist.total().is_one() {
                        return Err(format!("{} {p} sums to {}", dist.scheme(), dist.total()));
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} distributions sum to exactly 1"))
}

fn mean_consistency() -> Outcome {
    let mut checked = 0;
    for n in 1..=30 {
        for m in 1..=n {
            for k in 1..=6 {
                let p = params(n, m, k);
                if mean_coverage(&p) != mean_coverage_closed_form(&p) {
                    return Err(format!("mean mismatch at {p}"));
                }
                checked += 1;
            }
        }
    }
    let specific = mean_coverage(&params(4, 2, 2));
    if specific != 3u64 {
        return Err(format!("mean(4,2,2) = {specific}"));
    }
    Ok(format!("{checked} parameter sets exact, mean(4,2,2) = 3"))
}

fn conditional_equivalence() -> Outcome {
    let mut checked = 0;
    for n in 1..=5 {
        for m in 1..=2.min(n) {
            for k in 1..=2 {
                let p = params(n, m, k);
                let oracle = enumerate_multinomial_scheme(&p, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
                let conditional = oracle.conditional_distribution().ok_or("no repeat-free outcomes")?;
                if conditional != coverage_pmf(&p) {
                    return Err(format!("conditional distribution differs at {p}"));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} parameter sets exact"))
}

fn theorem2_inequality() -> Outcome {
    let mut rows = 0;
    for n in 1..=8 {
        for m in 1..=3.min(n) {
            for k in 1..=3 {
                let p = params(n, m, k);
                let report = theorem2_check(&p);
                for row in &report.rows {
                    // recompute the right side from its defining formula
                    let rhs = Rational::new(
                        binomial(n as u64, row.t as i64) * r_count(k, m, row.t),
                        num_traits::pow(BigInt::from(n), (k * m) as usize),
                    );
                    let lhs = &all_distinct_probability(&p) * &coverage_pmf(&p).pmf(row.t);
                    if row.rhs != rhs || row.lhs != lhs || (lhs > rhs) || row.holds != (lhs <= rhs) {
                        return Err(format!("{p} t={}: lhs={lhs} rhs={rhs}", row.t));
                    }
                    if m == 1 && lhs != rhs {
                        return Err(format!("{p} t={}: m=1 must give equality", row.t));
                    }
                    rows += 1;
                }
                if !report.all_hold {
                    return Err(format!("{p} reported a failing row"));
                }
            }
        }
    }
    Ok(format!("{rows} rows satisfy lhs <= rhs, equality at m = 1"))
}

fn markov_soundness() -> Outcome {
    const TRIALS: u64 = 1_000_000;
    let mut lines = Vec::new();
    for (n, m, k) in [(100, 5, 3), (50, 4, 2), (200, 10, 5)] {
        let p = params(n, m, k);
        let emp = simulate(&SimulationConfig::new(p, Scheme::Multinomial, TRIALS, 42)).map_err(|e| e.to_string())?;
        let freq = emp.repetition_frequency().ok_or("no repetition count")?;
        let bound = (&repetition_mean(n, m) * &Rational::from(k as u64)).min(Rational::one()).approx();
        let distinct = all_distinct_probability(&p).approx();
        let se = (distinct * (1.0 - distinct) / TRIALS as f64).sqrt();
        if freq > bound + 5.0 * se {
            return Err(format!("{p}: repetition frequency {freq} above bound {bound}"));
        }
        let distinct_freq = 1.0 - freq;
        if (distinct_freq - distinct).abs() > 5.0 * se {
            return Err(format!("{p}: all-distinct frequency {distinct_freq} vs exact {distinct}"));
        }
        lines.push(format!("{p}: freq {freq:.5} <= {bound:.4}"));
    }
    Ok(lines.join("; "))
}

fn monte_carlo_fidelity() -> Outcome {
    let start = Instant::now();
    let p = params(20, 5, 3);
    let emp = simulate(&SimulationConfig::new(p, Scheme::Subset, 1_000_000, 42)).map_err(|e| e.to_string())?;
    let report = compare(&emp, &coverage_pmf(&p)).map_err(|e| e.to_string())?;
    let elapsed = within(Duration::from_secs(60), start)?;
    if report.total_variation_distance > 0.01 {
        return Err(format!("TV = {}", report.total_variation_distance));
    }
    Ok(format!("TV = {:.6}, {elapsed:?}", report.total_variation_distance))
}

fn planner_minimality() -> Outcome {
    let confident = PlanQuery {
        n: 4,
        m: 2,
        target: Target::Threshold {
            threshold: 4,
            confidence: Rational::new(1, 6),
        },
        scheme: Scheme::Subset,
        k_max: DEFAULT_K_MAX,
    };
    let plan = min_agents_confident(&confident).map_err(|e| e.to_string())?;
    let at_one = coverage_pmf(&params(4, 2, 1)).tail(4);
    if plan.k != 2 || !plan.verified_at_k_minus_1 || at_one >= Rational::new(1, 6) {
        return Err(format!("confident plan k={} (tail at k=1 is {at_one})", plan.k));
    }
    let expected = PlanQuery {
        target: Target::ExpectedFraction {
            expected_fraction: Rational::new(3, 4),
        },
        ..confident
    };
    let plan = min_agents_expected(&expected).map_err(|e| e.to_string())?;
    if plan.k != 2 {
        return Err(format!("expected-fraction plan k={}", plan.k));
    }
    Ok("confident k = 2 (fails at k = 1), expected k = 2".into())
}

fn simulate_determinism() -> Outcome {
    let run = |workers: &str| -> Result<Vec<u8>, String> {
        let out = bin()
            .args([
                "simulate", "--scheme", "subset", "--n", "20", "--m", "5", "--k", "3", "--trials", "200000",
                "--seed", "42", "--workers", workers,
            ])
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(String::from_utf8_lossy(&out.stderr).into_owned());
        }
        Ok(out.stdout)
    };
    let outputs = [run("1")?, run("1")?, run("8")?, run("8")?];
    if outputs.iter().any(|o| o != &outputs[0]) {
        return Err("outputs differ".into());
    }
    Ok(format!("4 runs byte-identical ({} bytes)", outputs[0].len()))
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 11] = [
        ("subset PMF equals enumeration", subset_oracle_equivalence),
        ("nested formula vs closed form", nested_vs_closed_form),
        ("surjection count equals t! S(mk, t)", stirling_identity),
        ("normalization of both schemes", normalization),
        ("mean consistency", mean_consistency),
        ("repeat-free multinomial equals subset scheme", conditional_equivalence),
        ("scheme comparison inequality", theorem2_inequality),
        ("Markov bound soundness", markov_soundness),
        ("Monte Carlo fidelity", monte_carlo_fidelity),
        ("planner minimality", planner_minimality),
        ("simulate determinism", simulate_determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    assert_eq!(failures, 0, "{failures} acceptance criteria failed");
}
