//! Smallest number of agents meeting a coverage target.

use serde::{Deserialize, Serialize};

use crate::distribution::{CoverageDistribution, Params, Scheme};
use crate::error::{Error, Result};
use crate::multinomial::multinomial_coverage_pmf;
use crate::rational::Rational;
use crate::subset::coverage_pmf;

pub const DEFAULT_K_MAX: u32 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Target {
    /// Expected covered fraction of the network, in `(0, 1]`.
    ExpectedFraction { expected_fraction: Rational },
    /// `Pr(coverage >= threshold) >= confidence`.
    Threshold { threshold: u32, confidence: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanQuery {
    pub n: u32,
    pub m: u32,
    pub target: Target,
    pub scheme: Scheme,
    pub k_max: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plan {
    pub k: u32,
    /// Expected covered fraction, or tail probability, at `k`.
    pub achieved: Rational,
    pub target: Target,
    /// The predicate was evaluated exactly at `k - 1` and failed (vacuous for `k = 1`).
    pub verified_at_k_minus_1: bool,
}

fn distribution(scheme: Scheme, params: &Params) -> CoverageDistribution {
    match scheme {
        Scheme::Subset => coverage_pmf(params),
        Scheme::Multinomial => multinomial_coverage_pmf(params),
    }
}

/// Per-node probability that a single agent misses a fixed node.
fn single_agent_miss(scheme: Scheme, params: &Params) -> Rational {
    let n = params.n() as u64;
    match scheme {
        Scheme::Subset => Rational::new(n - params.m() as u64, n),
        Scheme::Multinomial => Rational::new(n - 1, n).pow(params.m()),
    }
}

/// Expected covered fraction `1 - miss^k`.
pub fn expected_fraction_closed_form(scheme: Scheme, params: &Params) -> Rational {
    Rational::one() - single_agent_miss(scheme, params).pow(params.k())
}

fn check_fraction(name: &str, value: &Rational) -> Result<()> {
    if value.is_zero() || value.is_negative() || *value > 1u64 {
        return Err(Error::InvalidArgument(format!("{name} must lie in (0, 1], got {value}")));
    }
    Ok(())
}

pub fn min_agents_expected(query: &PlanQuery) -> Result<Plan> {
    let Target::ExpectedFraction { expected_fraction: alpha } = &query.target else {
        return Err(Error::InvalidArgument("query does not carry an expected fraction".into()));
    };
    check_fraction("expected fraction", alpha)?;
    if query.k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    let base = Params::new(query.n, query.m, 1)?;
    let miss = single_agent_miss(query.scheme, &base);
    let at = |k: u32| base.with_k(k);
    let holds = |k: u32| -> Result<bool> {
        Ok(expected_fraction_closed_form(query.scheme, &at(k)?) >= *alpha)
    };

    let k = if miss.is_zero() {
        1
    } else if alpha.is_one() {
        return Err(Error::Infeasible(format!(
            "full expected coverage is never reached with n={} m={} under the {} scheme",
            query.n, query.m, query.scheme
        )));
    } else {
        let estimate = ((Rational::one() - alpha).approx().ln() / miss.approx().ln()).ceil();
        let mut k = if estimate.is_finite() {
            estimate.clamp(1.0, query.k_max as f64) as u32
        } else {
            query.k_max
        };
        // the float estimate can land one off near exact boundaries
        while k > 1 && holds(k - 1)? {
            k -= 1;
        }
        while !holds(k)? {
            if k >= query.k_max {
                return Err(Error::CapExceeded {
                    k_max: query.k_max,
                    achieved: expected_fraction_closed_form(query.scheme, &at(query.k_max)?),
                });
            }
            k += 1;
        }
        k
    };

    // final check through the exact PMF mean rather than the closed form
    let n = Rational::from(query.n as u64);
    let fraction = |k: u32| -> Result<Rational> { Ok(distribution(query.scheme, &at(k)?).mean() / &n) };
    let achieved = fraction(k)?;
    let verified_at_k_minus_1 = k == 1 || fraction(k - 1)? < *alpha;
    debug_assert!(achieved >= *alpha);
    Ok(Plan {
        k,
        achieved,
        target: query.target.clone(),
        verified_at_k_minus_1,
    })
}

pub fn min_agents_confident(query: &PlanQuery) -> Result<Plan> {
    let Target::Threshold { threshold, confidence } = &query.target else {
        return Err(Error::InvalidArgument("query does not carry a threshold".into()));
    };
    check_fraction("confidence", confidence)?;
    if *threshold == 0 || *threshold > query.n {
        return Err(Error::InvalidArgument(format!(
            "threshold must lie in [1, n={}], got {threshold}",
            query.n
        )));
    }
    if query.k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    let base = Params::new(query.n, query.m, 1)?;
    let tau = *threshold as i64;
    let tail = |k: u32| -> Result<Rational> { Ok(distribution(query.scheme, &base.with_k(k)?).tail(tau)) };

    // Every agent landing on the same nodes has positive probability, so
    // certainty is out of reach whenever tau exceeds the minimum coverage.
    let lo = query.scheme.support_lo(&base) as i64;
    if confidence.is_one() && tau > lo {
        return Err(Error::CapExceeded {
            k_max: query.k_max,
            achieved: tail(query.k_max)?,
        });
    }

    // linear scan: every smaller k has already failed when we return
    for k in 1..=query.k_max {
        let achieved = tail(k)?;
        if achieved >= *confidence {
            return Ok(Plan {
                k,
                achieved,
                target: query.target.clone(),
                verified_at_k_minus_1: true,
            });
        }
    }
    Err(Error::CapExceeded {
        k_max: query.k_max,
        achieved: tail(query.k_max)?,
    })
}

/// Dispatches on the target kind.
pub fn plan(query: &PlanQuery) -> Result<Plan> {
    match query.target {
        Target::ExpectedFraction { .. } => min_agents_expected(query),
        Target::Threshold { .. } => min_agents_confident(query),
    }
}
