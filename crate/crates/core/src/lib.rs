//! Exact coverage distributions for randomly roving agents.
//!
//! `k` agents each visit `m` of the `n` nodes of a sensor network. Two
//! allocation schemes are modelled:
//!
//! * [`Scheme::Subset`]: every agent visits a uniform `m`-subset.
//! * [`Scheme::Multinomial`]: every agent makes `m` independent uniform
//!   single-node draws, so an agent may revisit a node.
//!
//! All probabilities are exact [`Rational`]s. Exhaustive enumeration
//! ([`oracle`]) and seeded sampling ([`monte_carlo`]) provide independent
//! checks, and [`planner`] answers "how many agents are enough".

pub mod combinatorics;
pub mod distribution;
pub mod error;
pub mod monte_carlo;
pub mod multinomial;
pub mod oracle;
pub mod planner;
pub mod rational;
pub mod subset;

pub use distribution::{CoverageDistribution, Params, Scheme};
pub use error::{Error, Result};
pub use rational::Rational;

/// Exact coverage PMF under either scheme.
pub fn coverage_distribution(scheme: Scheme, params: &Params) -> CoverageDistribution {
    match scheme {
        Scheme::Subset => subset::coverage_pmf(params),
        Scheme::Multinomial => multinomial::multinomial_coverage_pmf(params),
    }
}
