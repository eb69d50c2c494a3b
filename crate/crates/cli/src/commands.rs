use std::fmt;

use serde::Serialize;
use serde_json::{json, Value};

use rove_cover::combinatorics::{stirling2, stirling2_recurrence};
use rove_cover::monte_carlo::{compare, simulate, EmpiricalDistribution, SimulationConfig};
use rove_cover::multinomial::{markov_repetition_bound_with, theorem2_check};
use rove_cover::oracle::{enumerate_multinomial_scheme, enumerate_subset_scheme, OracleResult};
use rove_cover::planner::{plan, PlanQuery, Target};
use rove_cover::subset::{coverage_pmf, coverage_pmf_nested};
use rove_cover::{coverage_distribution, CoverageDistribution, Error, Params, Rational, Scheme};

use crate::args::{Cli, Command, Format, ParamArgs, SimArgs};
use crate::output::{self, rational_fields, Table};

#[derive(Debug)]
pub struct CliError {
    message: String,
    budget: bool,
}

impl CliError {
    pub fn is_budget(&self) -> bool {
        self.budget
    }

    fn invalid(message: impl Into<String>) -> Self {
        CliError {
            message: message.into(),
            budget: false,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        CliError {
            budget: matches!(err, Error::BudgetExceeded { .. }),
            message: err.to_string(),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn to_value<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("result serializes")
}

fn params_of(args: &ParamArgs) -> CliResult<Params> {
    Ok(Params::new(args.n, args.m, args.k)?)
}

fn params_echo(p: &Params) -> Value {
    json!({"n": p.n(), "m": p.m(), "k": p.k()})
}

fn with_scheme(mut echo: Value, scheme: Scheme) -> Value {
    echo["scheme"] = json!(scheme.as_str());
    echo
}

fn no_csv(command: &str) -> CliError {
    CliError::invalid(format!("--format csv is not available for `{command}`"))
}

/// Executes the parsed command and renders its standard output.
pub fn run(cli: &Cli) -> CliResult<String> {
    let format = cli.format;
    match &cli.command {
        Command::Dist { scheme, params, t } => {
            let scheme = Scheme::from(scheme.scheme);
            let p = params_of(params)?;
            let dist = coverage_distribution(scheme, &p);
            let mut echo = with_scheme(params_echo(&p), scheme);
            match t {
                Some(t) => {
                    echo["t"] = json!(t);
                    let prob = dist.pmf(*t);
                    match format {
                        Format::Json => Ok(output::json("dist", echo, json!({"t": t, "probability": prob}))),
                        Format::Csv => Ok(distribution_csv([(*t, &prob)].into_iter())),
                    }
                }
                None => match format {
                    Format::Json => Ok(output::json("dist", echo, to_value(&dist))),
                    Format::Csv => Ok(distribution_csv(dist.iter())),
                },
            }
        }
        Command::Mean { scheme, params } => {
            let scheme = Scheme::from(scheme.scheme);
            let p = params_of(params)?;
            if format == Format::Csv {
                return Err(no_csv("mean"));
            }
            let mean = coverage_distribution(scheme, &p).mean();
            Ok(output::json("mean", with_scheme(params_echo(&p), scheme), json!({"mean": mean})))
        }
        Command::Tail { scheme, params, tau } => {
            let scheme = Scheme::from(scheme.scheme);
            let p = params_of(params)?;
            if format == Format::Csv {
                return Err(no_csv("tail"));
            }
            let prob = coverage_distribution(scheme, &p).tail(*tau);
            let mut echo = with_scheme(params_echo(&p), scheme);
            echo["tau"] = json!(tau);
            Ok(output::json("tail", echo, json!({"tau": tau, "probability": prob})))
        }
        Command::Bounds { params, epsilon } => {
            let p = params_of(params)?;
            if format == Format::Csv {
                return Err(no_csv("bounds"));
            }
            let report = markov_repetition_bound_with(&p, *epsilon)?;
            let mut echo = params_echo(&p);
            echo["epsilon"] = json!(epsilon);
            Ok(output::json("bounds", echo, to_value(&report)))
        }
        Command::Theorem2 { params } => {
            let p = params_of(params)?;
            let report = theorem2_check(&p);
            match format {
                Format::Json => Ok(output::json("theorem2", params_echo(&p), to_value(&report))),
                Format::Csv => {
                    let mut table = Table::new(&[
                        "t", "lhs_num", "lhs_den", "lhs_approx", "rhs_num", "rhs_den", "rhs_approx", "holds",
                    ]);
                    for row in &report.rows {
                        let mut fields = vec![row.t.to_string()];
                        fields.extend(rational_fields(&row.lhs));
                        fields.extend(rational_fields(&row.rhs));
                        fields.push(row.holds.to_string());
                        table.row(fields);
                    }
                    Ok(table.finish())
                }
            }
        }
        Command::Stirling { big_n, big_k } => {
            if *big_n == 0 || *big_k == 0 {
                return Err(CliError::invalid("N and K must be at least 1"));
            }
            if format == Format::Csv {
                return Err(no_csv("stirling"));
            }
            let value = stirling2(*big_n, *big_k);
            let agrees = value == stirling2_recurrence(*big_n, *big_k);
            if !agrees {
                return Err(CliError::invalid(format!(
                    "internal inconsistency: Stirling routes disagree at S({big_n},{big_k})"
                )));
            }
            Ok(output::json(
                "stirling",
                json!({"N": big_n, "K": big_k}),
                json!({"N": big_n, "K": big_k, "value": value.to_string(), "recurrence_agrees": agrees}),
            ))
        }
        Command::Crosscheck { params } => {
            let p = params_of(params)?;
            if format == Format::Csv {
                return Err(no_csv("crosscheck"));
            }
            let report = crosscheck(&p, cli.budget)?;
            Ok(output::json("crosscheck", params_echo(&p), report))
        }
        Command::Enumerate { scheme, params } => {
            let scheme = Scheme::from(scheme.scheme);
            let p = params_of(params)?;
            let result = match scheme {
                Scheme::Subset => enumerate_subset_scheme(&p, cli.budget)?,
                Scheme::Multinomial => enumerate_multinomial_scheme(&p, cli.budget)?,
            };
            let echo = with_scheme(params_echo(&p), scheme);
            match format {
                Format::Json => Ok(output::json("enumerate", echo, to_value(&result))),
                Format::Csv => Ok(oracle_csv(&result)),
            }
        }
        Command::Simulate(sim) => {
            let (config, echo) = sim_config(sim)?;
            let emp = simulate(&config)?;
            match format {
                Format::Json => Ok(output::json("simulate", echo, to_value(&emp))),
                Format::Csv => Ok(empirical_csv(&emp)),
            }
        }
        Command::Compare(sim) => {
            let (config, echo) = sim_config(sim)?;
            if format == Format::Csv {
                return Err(no_csv("compare"));
            }
            let emp = simulate(&config)?;
            let exact = coverage_distribution(config.scheme, &config.params);
            let report = compare(&emp, &exact)?;
            Ok(output::json("compare", echo, to_value(&report)))
        }
        Command::Plan {
            scheme,
            n,
            m,
            alpha,
            tau,
            p,
            k_max,
        } => {
            if format == Format::Csv {
                return Err(no_csv("plan"));
            }
            let scheme = Scheme::from(scheme.scheme);
            let target = match (alpha, tau, p) {
                (Some(alpha), None, None) => Target::ExpectedFraction {
                    expected_fraction: alpha.clone(),
                },
                (None, Some(tau), Some(p)) => Target::Threshold {
                    threshold: *tau,
                    confidence: p.clone(),
                },
                _ => return Err(CliError::invalid("plan needs either --alpha or both --tau and --p")),
            };
            let query = PlanQuery {
                n: *n,
                m: *m,
                target: target.clone(),
                scheme,
                k_max: *k_max,
            };
            let echo = json!({"n": n, "m": m, "scheme": scheme.as_str(), "target": target, "k_max": k_max});
            let result = match plan(&query) {
                Ok(plan) => to_value(&plan),
                Err(Error::CapExceeded { k_max, achieved }) => json!({
                    "k": null,
                    "achieved": achieved,
                    "target": target,
                    "verified_at_k_minus_1": false,
                    "cap_exceeded": true,
                    "k_max": k_max,
                }),
                Err(other) => return Err(other.into()),
            };
            Ok(output::json("plan", echo, result))
        }
    }
}

fn sim_config(sim: &SimArgs) -> CliResult<(SimulationConfig, Value)> {
    let scheme = Scheme::from(sim.scheme.scheme);
    let p = params_of(&sim.params)?;
    let config = SimulationConfig::new(p, scheme, sim.trials, sim.seed).with_workers(sim.workers);
    let mut echo = with_scheme(params_echo(&p), scheme);
    echo["trials"] = json!(sim.trials);
    echo["seed"] = json!(sim.seed);
    Ok((config, echo))
}

fn distribution_csv<'a>(rows: impl Iterator<Item = (u32, &'a Rational)>) -> String {
    let mut table = Table::new(&["t", "num", "den", "approx"]);
    for (t, p) in rows {
        let mut fields = vec![t.to_string()];
        fields.extend(rational_fields(p));
        table.row(fields);
    }
    table.finish()
}

fn oracle_csv(result: &OracleResult) -> String {
    let dist = result.distribution();
    let mut table = Table::new(&["t", "count", "num", "den", "approx"]);
    for (t, p) in dist.iter() {
        let count = result.union_size_counts.get(&t).cloned().unwrap_or_default();
        let mut fields = vec![t.to_string(), count.to_string()];
        fields.extend(rational_fields(p));
        table.row(fields);
    }
    table.finish()
}

fn empirical_csv(emp: &EmpiricalDistribution) -> String {
    let mut table = Table::new(&["t", "count", "frequency"]);
    for (&t, &count) in &emp.counts {
        table.row(vec![
            t.to_string(),
            count.to_string(),
            output::format_float(count as f64 / emp.total_trials as f64),
        ]);
    }
    table.finish()
}

#[derive(Serialize)]
struct Discrepancy {
    t: u32,
    lhs: Rational,
    rhs: Rational,
}

fn discrepancies(lhs: &CoverageDistribution, rhs: &CoverageDistribution) -> Vec<Discrepancy> {
    let lo = lhs.support_lo().min(rhs.support_lo());
    let hi = lhs.support_hi().max(rhs.support_hi());
    (lo..=hi)
        .filter_map(|t| {
            let (a, b) = (lhs.pmf(t), rhs.pmf(t));
            (a != b).then_some(Discrepancy { t, lhs: a, rhs: b })
        })
        .collect()
}

/// Nested-sum formula (lhs) against the closed form (rhs), with exhaustive
/// enumeration as the arbiter when it fits in the budget.
pub fn crosscheck(p: &Params, budget: u64) -> CliResult<Value> {
    let closed = coverage_pmf(p);
    let nested = coverage_pmf_nested(p, budget)?;
    let nested_vs_closed = discrepancies(&nested, &closed);

    let enumeration = match enumerate_subset_scheme(p, budget) {
        Ok(oracle) => {
            let truth = oracle.distribution();
            let closed_diff = discrepancies(&closed, &truth);
            let nested_diff = discrepancies(&nested, &truth);
            json!({
                "status": "ok",
                "total_outcomes": oracle.total_outcomes.to_string(),
                "closed_form_agrees": closed_diff.is_empty(),
                "nested_agrees": nested_diff.is_empty(),
                "closed_form_discrepancies": closed_diff,
                "nested_discrepancies": nested_diff,
            })
        }
        Err(Error::BudgetExceeded { required, .. }) => json!({
            "status": "skipped",
            "reason": format!("{required} outcomes exceed the budget of {budget}"),
        }),
        Err(other) => return Err(other.into()),
    };

    Ok(json!({
        "agree": nested_vs_closed.is_empty(),
        "lhs": "nested",
        "rhs": "closed_form",
        "discrepancies": nested_vs_closed,
        "enumeration": enumeration,
    }))
}
