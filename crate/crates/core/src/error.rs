use thiserror::Error;

use crate::extobj::ExternalError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Contract violations and evaluation failures raised by the optimizers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid search space: {0}")]
    InvalidSpace(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("population is empty")]
    EmptyPopulation,

    #[error("evaluation failed at {position:?}: {source}")]
    Evaluation {
        position: Vec<f64>,
        #[source]
        source: EvalError,
    },
}

/// Failure of a single objective evaluation.
#[derive(Debug, Error)]
pub enum EvalError {
    #[error("objective returned a non-finite value ({0})")]
    NonFinite(f64),

    #[error("evaluator expected {expected} coordinates, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("evaluation budget of {0} exhausted")]
    BudgetExhausted(u64),

    #[error(transparent)]
    External(#[from] ExternalError),
}
