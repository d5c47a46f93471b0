use thiserror::Error;

/// Errors raised by sets, objectives, stepsize rules, the solver and the audits.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite input in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter `{key}`: {reason}")]
    InvalidParameter { key: String, reason: String },

    #[error("gradient is singular at the given point ({0})")]
    Singular(String),

    #[error("unsupported capability: {0}")]
    Unsupported(String),

    #[error("objective is checker-only: {0}")]
    CheckerOnly(String),

    #[error("point is infeasible (violation {violation:e} exceeds tolerance {tol:e})")]
    Infeasible { violation: f64, tol: f64 },

    #[error("line search failed after {tries} backtracks (last tested stepsize {last_lambda:e})")]
    LineSearchFailure { tries: u32, last_lambda: f64 },

    #[error("Lipschitz estimation failed after {tries} doublings (last tested stepsize {last_lambda:e})")]
    EstimationFailure { tries: u32, last_lambda: f64 },

    #[error("strategy mismatch: audit `{audit}` does not apply to strategy `{strategy}`")]
    StrategyMismatch { audit: String, strategy: String },

    #[error("missing constant: {0}")]
    MissingConstant(String),
}

impl Error {
    pub(crate) fn invalid(key: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            key: key.to_string(),
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
