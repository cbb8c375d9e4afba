use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("coordinate index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: label {label} is not one of 0, 1, -1, +1")]
    Label { line: usize, label: String },

    #[error("{}: {source}", path.display())]
    Dataset {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error("need at least 3 samples for the Hessian fit, got {0}")]
    InsufficientSamples(usize),

    #[error("subspace Hessian unavailable: normal equations are singular")]
    HessianUnavailable,

    #[error("non-finite objective value at {0}")]
    NonFinite(&'static str),

    #[error("evaluation budget of {0} exhausted")]
    BudgetExhausted(u64),

    #[error("cache belongs to plan {cache}, records belong to plan {records}")]
    PlanMismatch { cache: u64, records: u64 },

    #[error("malformed trace file: {0}")]
    Trace(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
