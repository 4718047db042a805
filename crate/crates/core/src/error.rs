use thiserror::Error;

/// Errors raised by the library. The CLI maps each variant onto an exit status.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {node}: {reason}")]
    Validation { node: String, reason: String },

    #[error("{what} = {value} is outside the horizon [1..{horizon}]")]
    OutOfRange {
        what: &'static str,
        value: usize,
        horizon: usize,
    },

    #[error("search budget of {budget} nodes exhausted")]
    BudgetExhausted { budget: u64 },

    #[error("unknown experiment id `{0}`")]
    UnknownExperiment(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn validation(node: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            node: node.into(),
            reason: reason.into(),
        }
    }

    /// Short machine-readable tag, used in CLI error JSON and FFI error codes.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Validation { .. } => "validation",
            Error::OutOfRange { .. } => "out_of_range",
            Error::BudgetExhausted { .. } => "budget_exhausted",
            Error::UnknownExperiment(_) => "unknown_experiment",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
