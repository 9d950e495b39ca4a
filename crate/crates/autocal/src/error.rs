//! Error type shared across the crate.
//!
//! Two families matter to callers: input problems (bad files, bad flags,
//! samples that do not match the model) and numerical problems (degenerate
//! null distributions, quantile solves that cannot succeed). The CLI maps
//! the first family to exit code 2 and the second to exit code 3.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("sample is empty")]
    EmptySample,

    #[error("observation {index}: {reason}")]
    InvalidObservation { index: usize, reason: String },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("observation {index}: prediction {prediction} matches no partition level")]
    UnknownLevel { index: usize, prediction: f64 },

    #[error("level {level} has {count} observation(s); need at least 2 to estimate a variance")]
    LevelUnderpopulated { level: f64, count: usize },

    #[error("level {level} has no observations")]
    EmptyLevel { level: f64 },

    #[error("mean response or mean prediction is not positive; concentration curve undefined")]
    ZeroMean,

    #[error("level index {index} has zero probability-weighted variance; statistic undefined")]
    DegenerateLevel { index: usize },

    #[error("null model has no positive probability-weighted variance; distribution degenerate")]
    DegenerateModel,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code the CLI uses for this error: 2 for input problems,
    /// 3 for numerical ones.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DegenerateLevel { .. }
            | Error::DegenerateModel
            | Error::Domain(_)
            | Error::Numerical(_) => 3,
            _ => 2,
        }
    }

    /// Stable machine-readable tag, used in JSON error output and reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptySample => "empty_sample",
            Error::InvalidObservation { .. } => "invalid_observation",
            Error::InvalidPartition(_) => "invalid_partition",
            Error::InvalidModel(_) => "invalid_model",
            Error::InvalidInput(_) => "invalid_input",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::UnknownLevel { .. } => "unknown_level",
            Error::LevelUnderpopulated { .. } => "level_underpopulated",
            Error::EmptyLevel { .. } => "empty_level",
            Error::ZeroMean => "zero_mean",
            Error::DegenerateLevel { .. } => "degenerate_level",
            Error::DegenerateModel => "degenerate_model",
            Error::Domain(_) => "domain",
            Error::Numerical(_) => "numerical",
            Error::Parse { .. } => "parse",
            Error::Io { .. } => "io",
        }
    }
}
