use thiserror::Error;

/// Errors produced by the spectral pipeline and the experiment drivers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("negative magnitude {value} at index {index}")]
    NegativeMagnitude { index: usize, value: f64 },

    #[error("non-finite {what} at index {index}")]
    NonFinite { what: &'static str, index: usize },

    #[error("naive transform refused: N = {n} exceeds oracle cap {cap}")]
    OracleCapExceeded { n: usize, cap: usize },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid function descriptor: {0}")]
    InvalidDescriptor(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("all-zero signal has no defined RMS")]
    ZeroSignal,
}

pub type Result<T> = std::result::Result<T, Error>;
