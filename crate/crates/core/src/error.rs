use thiserror::Error;

/// Errors raised by field construction, grids, labeling and the growth checks.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("index out of range: {0}")]
    Range(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("field vanishes identically on the probe set: {0}")]
    ZeroField(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("empty region: {0}")]
    EmptyRegion(String),
    #[error("labeling produced no nonzero cells (tolerance {0:e})")]
    AllZero(f64),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}
