//! Coverage when every agent makes `m` independent uniform single-node draws
//! (repeats allowed), the repetition bounds for that scheme, and its exact
//! comparison with the subset scheme.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, factorial, falling_factorial, stirling2, BinomialTable};
use crate::distribution::{CoverageDistribution, Params, Scheme};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::subset::coverage_pmf;

/// Number of length-`mk` sequences over a `t`-letter alphabet that use every
/// letter, by inclusion-exclusion.
pub fn r_count(k: u32, m: u32, t: u32) -> BigInt {
    let len = k as usize * m as usize;
    if t == 0 || t as usize > len {
        return BigInt::zero();
    }
    let table = BinomialTable::new(t as u64);
    r_count_with(&table, t, &|j| num_traits::pow(BigInt::from(j), len))
}

fn r_count_with(table: &BinomialTable, t: u32, sequences: &dyn Fn(u32) -> BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for i in 0..t {
        let term = table.get(t as u64, i as i64) * sequences(t - i);
        if i % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// `t! S(mk, t)`; must agree with [`r_count`].
pub fn r_via_stirling(k: u32, m: u32, t: u32) -> BigInt {
    if t == 0 {
        return BigInt::zero();
    }
    factorial(t as u64) * stirling2(k * m, t)
}

/// Exact PMF of the number of distinct nodes hit by `mk` uniform draws, over
/// `t` in `[1, min(km, n)]`.
pub fn multinomial_coverage_pmf(params: &Params) -> CoverageDistribution {
    let n = params.n();
    let len = params.visits() as usize;
    let hi = params.max_coverage();
    let table = BinomialTable::new(n as u64);
    let powers: Vec<BigInt> = (0..=hi).map(|j| num_traits::pow(BigInt::from(j), len)).collect();
    let sequences = |j: u32| powers[j as usize].clone();
    let total = num_traits::pow(BigInt::from(n), len);
    let pmf = (1..=hi)
        .map(|t| {
            let r = r_count_with(&table, t, &sequences);
            Rational::new(table.get(n as u64, t as i64) * r, total.clone())
        })
        .collect();
    CoverageDistribution::from_parts(*params, Scheme::Multinomial, pmf)
}

/// Expected number of within-stage colliding pairs, `C(m,2)/n`.
pub fn repetition_mean(n: u32, m: u32) -> Rational {
    assert!(n >= 1, "repetition_mean needs n >= 1");
    Rational::new(binomial(m as u64, 2), BigInt::from(n))
}

/// Probability that all `k` stages draw `m` pairwise distinct nodes,
/// `(n (n-1) ... (n-m+1) / n^m)^k`.
pub fn all_distinct_probability(params: &Params) -> Rational {
    let n = params.n() as u64;
    let single = Rational::new(
        falling_factorial(n, params.m() as u64),
        num_traits::pow(BigInt::from(n), params.m() as usize),
    );
    single.pow(params.k())
}

/// Markov-inequality bounds on within-stage repetition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub params: Params,
    /// Markov threshold: at least this many colliding pairs in a stage.
    pub epsilon: u32,
    pub repetition_mean: Rational,
    pub single_stage_markov_bound: Rational,
    pub single_stage_clamped: bool,
    pub all_stages_markov_bound: Rational,
    pub all_stages_clamped: bool,
    pub all_distinct_probability: Rational,
}

/// Bounds with `epsilon = 1`.
pub fn markov_repetition_bound(params: &Params) -> BoundReport {
    markov_repetition_bound_with(params, 1).expect("epsilon = 1 is valid")
}

pub fn markov_repetition_bound_with(params: &Params, epsilon: u32) -> Result<BoundReport> {
    if epsilon == 0 {
        return Err(Error::InvalidArgument("epsilon must be at least 1".into()));
    }
    let mean = repetition_mean(params.n(), params.m());
    let single_raw = &mean / &Rational::from(epsilon as u64);
    let all_raw = &single_raw * &Rational::from(params.k() as u64);
    let clamp = |r: Rational| {
        if r > 1u64 {
            (Rational::one(), true)
        } else {
            (r, false)
        }
    };
    let (single_stage_markov_bound, single_stage_clamped) = clamp(single_raw);
    let (all_stages_markov_bound, all_stages_clamped) = clamp(all_raw);
    Ok(BoundReport {
        params: *params,
        epsilon,
        repetition_mean: mean,
        single_stage_markov_bound,
        single_stage_clamped,
        all_stages_markov_bound,
        all_stages_clamped,
        all_distinct_probability: all_distinct_probability(params),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theorem2Row {
    pub t: u32,
    /// All-distinct probability times the subset-scheme probability of `t`.
    pub lhs: Rational,
    /// Multinomial-scheme probability of `t`.
    pub rhs: Rational,
    pub holds: bool,
}

/// Row-by-row check that the subset scheme, scaled by the all-distinct
/// probability, never exceeds the multinomial scheme.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theorem2Report {
    pub params: Params,
    pub all_distinct_probability: Rational,
    /// `k C(m,2) / n`; the comparison tightens as this goes to zero.
    pub condition_value: Rational,
    pub rows: Vec<Theorem2Row>,
    pub all_hold: bool,
}

pub fn theorem2_check(params: &Params) -> Theorem2Report {
    let subset = coverage_pmf(params);
    let multi = multinomial_coverage_pmf(params);
    let p = all_distinct_probability(params);
    let rows: Vec<Theorem2Row> = subset
        .iter()
        .map(|(t, prob)| {
            let lhs = &p * prob;
            let rhs = multi.pmf(t);
            let holds = lhs <= rhs;
            Theorem2Row { t, lhs, rhs, holds }
        })
        .collect();
    let all_hold = rows.iter().all(|r| r.holds);
    Theorem2Report {
        params: *params,
        condition_value: &repetition_mean(params.n(), params.m()) * &Rational::from(params.k() as u64),
        all_distinct_probability: p,
        rows,
        all_hold,
    }
}
