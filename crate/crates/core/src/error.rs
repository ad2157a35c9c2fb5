use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter `{name}` out of range: {value} ({expected})")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("covariance factorization failed at grid index {index} (spacing {spacing:e})")]
    Factorization { index: usize, spacing: f64 },

    #[error("normalization bracket search exceeded x = {cap:e}")]
    Normalization { cap: f64 },

    #[error("y = {y} lies outside the range [0, {max}] of s * g(s) on the envelope grid")]
    EnvelopeRange { y: f64, max: f64 },

    #[error("constant undefined: {0}")]
    UndefinedConstant(&'static str),

    #[error("invalid solver configuration: {0}")]
    Config(String),

    #[error("invalid density: {0}")]
    Density(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn out_of_range(name: &'static str, value: f64, expected: &'static str) -> Self {
        Error::ParameterOutOfRange {
            name,
            value,
            expected,
        }
    }
}
