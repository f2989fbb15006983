use thiserror::Error;

/// Errors raised across the optimizer, benchmark, statistics, and assignment layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid search space: {0}")]
    InvalidSpace(String),

    #[error("{id} expects dimension {expected}, got {actual}")]
    DimensionMismatch { id: String, expected: usize, actual: usize },

    #[error("objective returned non-finite value {value} at position {position:?}")]
    NonFiniteObjective { value: f64, position: Vec<f64> },

    #[error("unknown function {0:?}")]
    UnknownFunction(String),

    #[error("{id} has fixed dimension {dim}")]
    FixedDimension { id: String, dim: usize },

    #[error("insufficient sample: need at least {needed} values, got {got}")]
    InsufficientSample { needed: usize, got: usize },

    #[error("empty sample")]
    EmptySample,

    #[error("invalid cost matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("brute force limited to n <= {limit}, got n = {n}")]
    SizeLimit { n: usize, limit: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
