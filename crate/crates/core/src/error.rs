use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("item {item}: {message}")]
    InvalidItem { item: usize, message: String },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("infeasible model: no feasible set")]
    Infeasible,

    #[error("empty list of distributions")]
    EmptyList,

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("division guard: {0}")]
    DivisionGuard(String),

    #[error("missing hedge coin for local-hedging surrogate")]
    MissingCoin,

    #[error(
        "enumeration needs {needed} branches but the budget is {budget}; \
         use Monte Carlo evaluation (--mc with --trials/--seed) or raise the budget"
    )]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("unknown policy `{0}` (expected weitzman, local-hedging or commit-enum)")]
    UnknownPolicy(String),

    #[error("no greedy rule available: {0}")]
    NoGreedyRule(String),

    #[error("greedy rule misbehaved: {0}")]
    RuleViolation(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
