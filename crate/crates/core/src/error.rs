use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameters n={n}, m={m}, k={k}: {reason}")]
    InvalidParams { n: u64, m: u64, k: u64, reason: &'static str },
    #[error("nested-sum formula is only defined for k >= 4, got k={0}")]
    NestedNeedsFourAgents(u32),
    #[error("{what}: {required} exceeds the budget of {budget}")]
    BudgetExceeded { what: &'static str, required: String, budget: u64 },
    #[error("distributions do not match: {0}")]
    Mismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("target is infeasible: {0}")]
    Infeasible(String),
    #[error("target not reached within k_max={k_max}; probability at k_max is {achieved}")]
    CapExceeded { k_max: u32, achieved: Rational },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
