use clap::{Args, Parser, Subcommand, ValueEnum};
use rove_cover::oracle::DEFAULT_BUDGET;
use rove_cover::planner::DEFAULT_K_MAX;
use rove_cover::{Rational, Scheme};

#[derive(Debug, Parser)]
#[command(name = "rove-cover", version, about = "Exact coverage analysis for randomly roving agents")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    /// Outcome/term budget for enumeration and the nested-sum formula.
    #[arg(
        long,
        env = "ROVE_COVER_BUDGET",
        default_value_t = DEFAULT_BUDGET,
        value_parser = clap::value_parser!(u64).range(1..),
        global = true
    )]
    pub budget: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Subset,
    Multinomial,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Scheme {
        match s {
            SchemeArg::Subset => Scheme::Subset,
            SchemeArg::Multinomial => Scheme::Multinomial,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// Number of nodes.
    #[arg(long)]
    pub n: u32,
    /// Nodes visited per agent.
    #[arg(long)]
    pub m: u32,
    /// Number of agents.
    #[arg(long)]
    pub k: u32,
}

#[derive(Debug, Clone, Args)]
pub struct SchemeFlag {
    #[arg(long, value_enum, default_value_t = SchemeArg::Subset)]
    pub scheme: SchemeArg,
}

#[derive(Debug, Clone, Args)]
pub struct SimArgs {
    #[command(flatten)]
    pub scheme: SchemeFlag,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub workers: u32,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact coverage distribution.
    Dist {
        #[command(flatten)]
        scheme: SchemeFlag,
        #[command(flatten)]
        params: ParamArgs,
        /// Report only the probability of exactly this many covered nodes.
        #[arg(long)]
        t: Option<u32>,
    },
    /// Exact expected coverage.
    Mean {
        #[command(flatten)]
        scheme: SchemeFlag,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Probability of covering at least `tau` nodes.
    Tail {
        #[command(flatten)]
        scheme: SchemeFlag,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, allow_negative_numbers = true)]
        tau: i64,
    },
    /// Repetition bounds for the multinomial scheme.
    Bounds {
        #[command(flatten)]
        params: ParamArgs,
        /// Markov threshold (minimum number of colliding pairs).
        #[arg(long, default_value_t = 1)]
        epsilon: u32,
    },
    /// Exact comparison of the two schemes row by row.
    Theorem2 {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Stirling number of the second kind S(N, K).
    Stirling {
        #[arg(long = "N")]
        big_n: u32,
        #[arg(long = "K")]
        big_k: u32,
    },
    /// Closed form versus nested-sum formula versus enumeration.
    Crosscheck {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Exhaustive enumeration of all outcomes.
    Enumerate {
        #[command(flatten)]
        scheme: SchemeFlag,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Monte Carlo frequency table.
    Simulate(SimArgs),
    /// Monte Carlo frequencies measured against the exact distribution.
    Compare(SimArgs),
    /// Minimal number of agents for a coverage target.
    Plan {
        #[command(flatten)]
        scheme: SchemeFlag,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u32,
        /// Target expected covered fraction.
        #[arg(long, conflicts_with_all = ["tau", "p"], required_unless_present = "tau")]
        alpha: Option<Rational>,
        /// Coverage threshold for the confidence target.
        #[arg(long, requires = "p")]
        tau: Option<u32>,
        /// Required probability of reaching `tau`.
        #[arg(long, requires = "tau")]
        p: Option<Rational>,
        #[arg(long, default_value_t = DEFAULT_K_MAX)]
        k_max: u32,
    },
}
