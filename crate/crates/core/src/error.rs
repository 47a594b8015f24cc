use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("spectrum band {band} does not fit a grid of {n} samples (need n >= 2*band + 2)")]
    BandOverflow { band: usize, n: usize },
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn invalid_query(msg: impl Into<String>) -> Error {
    Error::InvalidQuery(msg.into())
}
