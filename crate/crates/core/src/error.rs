use thiserror::Error;

/// Everything that can go wrong outside the peeling hot loop.
#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex id {id} out of range for n = {n}")]
    InputRange { id: u64, n: u64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("format error: {0}")]
    Format(String),

    #[error("capacity error: {0}")]
    Capacity(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("hash bag overflow: capacity {capacity} exhausted")]
    BagOverflow { capacity: usize },

    #[error("length mismatch: graph has {expected} vertices, coreness has {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
