use thiserror::Error;

/// Errors raised by the solvers, metrics and harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid block structure: {0}")]
    InvalidStructure(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("block vectors do not share a block structure")]
    StructureMismatch,

    #[error("invalid set descriptor: {0}")]
    InvalidSet(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("non-finite value from {source_name} at iteration {iteration}")]
    NonFinite {
        source_name: &'static str,
        iteration: u64,
    },

    #[error("solver stopped after {iterations} iterations with residual {residual:.3e} (tolerance {tolerance:.3e})")]
    NotConverged {
        iterations: u64,
        residual: f64,
        tolerance: f64,
    },

    #[error("the dual gap estimator needs a bounded feasible set; use the natural residual instead")]
    UnboundedSet,

    #[error("missing reference value: {0}")]
    MissingReference(String),

    #[error("N = {n} is below the validity threshold; the smallest admissible N is {min}")]
    BelowThreshold { n: u64, min: u64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
