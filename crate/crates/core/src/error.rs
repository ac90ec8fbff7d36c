//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,
    #[error("no target power")]
    NoTargetPower,
    #[error("undefined phase at index {0}")]
    UndefinedPhase(usize),
    #[error("series too short for 7-tap stencil")]
    SeriesTooShort,
    #[error("band out of range: {0}")]
    BandOutOfRange(String),
    #[error("variance undefined: fewer than 2 windows")]
    VarianceUndefined,
    #[error("timestamp mismatch between tracks")]
    TimestampMismatch,
    #[error("record shorter than one analysis window")]
    RecordTooShort,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
