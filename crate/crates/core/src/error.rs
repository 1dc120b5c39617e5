use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A model parameter violates its documented range.
    #[error("invalid value for `{name}`: {value} (expected {expected})")]
    Parameter {
        name: String,
        value: String,
        expected: String,
    },

    /// Operation called outside its domain (e.g. a year outside the scenario horizon).
    #[error("{0}")]
    Domain(String),

    #[error("config error: {0}")]
    Config(String),

    /// One or more rows of an input table failed validation.
    #[error("failed to load {path}:\n  {}", issues.join("\n  "))]
    Load { path: PathBuf, issues: Vec<String> },

    #[error("unknown city id `{0}`")]
    UnknownCity(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &str, value: impl std::fmt::Display, expected: &str) -> Self {
        Error::Parameter {
            name: name.to_string(),
            value: value.to_string(),
            expected: expected.to_string(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
