use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty dataset")]
    EmptyDataset,

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid cluster count {clusters} for {points} points (need 1 < C < N)")]
    InvalidClusterCount { clusters: usize, points: usize },

    #[error("fuzzifier must be > 1, got {0}")]
    InvalidFuzzifier(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("cost function returned {cost} at position {position:?}")]
    NonFiniteCost { cost: f64, position: Vec<f64> },

    #[error("label length {labels} does not match prediction length {predicted}")]
    LengthMismatch { predicted: usize, labels: usize },

    #[error("data file not found: {}", .0.display())]
    MissingFile(PathBuf),

    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },

    #[error("registry error: {0}")]
    Registry(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
