use thiserror::Error;

/// Errors produced by the simulation core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two values that must live on the same horizon do not.
    #[error("horizon mismatch: {left} vs {right}")]
    HorizonMismatch { left: String, right: String },

    /// Two masks that must share slot geometry do not.
    #[error("mask geometry mismatch: {0}")]
    MaskMismatch(String),

    /// The distortion budget is below the feasibility threshold
    /// `1 - exp(-lambda * delta)` for the given slot width.
    #[error("distortion budget {budget} is infeasible: it is below {threshold} (the source one-probability at lambda*delta = {lambda_delta})")]
    InfeasibleBudget {
        budget: f64,
        threshold: f64,
        lambda_delta: f64,
    },

    /// A codeword index outside `1..=count` was requested.
    #[error("codeword index {index} out of range 1..={count}")]
    IndexOutOfRange { index: u64, count: u64 },

    /// The requested codebook does not fit the configured search budget.
    #[error("codebook of {requested} codewords exceeds the search budget of {budget}; lower the rate or horizon, or raise the budget")]
    BudgetExceeded { requested: u64, budget: u64 },

    /// A configuration value is invalid or inconsistent.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// An approximation set violates its symmetric-difference budget.
    #[error("approximation for codeword {index} violates the symmetric-difference budget: measure {measure} > allowed {bound}")]
    BadApproximation {
        index: usize,
        measure: String,
        bound: String,
    },

    /// A text input (pattern file, code file, decimal) failed to parse.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
