use thiserror::Error;

/// Errors reported by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum BapError {
    #[error("dimension mismatch in {what}: expected {expected}, got {actual}")]
    Dimension {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("size parameters must be positive (m = {m}, n = {n})")]
    EmptySize { m: usize, n: usize },

    #[error("non-finite value in {what} at flat index {index}")]
    NonFinite { what: &'static str, index: usize },

    #[error("{what} is not a permutation of 0..{len}")]
    NotPermutation { what: &'static str, len: usize },

    #[error("{what}: {kind} {index} sums to {sum}, expected 1")]
    NotDoublyStochastic {
        what: &'static str,
        kind: &'static str,
        index: usize,
        sum: f64,
    },

    #[error("{what}: entry ({row}, {col}) = {value} lies outside [0, 1]")]
    OutOfUnitRange {
        what: &'static str,
        row: usize,
        col: usize,
        value: f64,
    },

    #[error("enumeration refused: {count} candidates exceed the cap of {cap}")]
    CapExceeded { count: u128, cap: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("padded solution crosses blocks at row {row}; the padding penalty is too small")]
    CrossingBlocks { row: usize },

    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, BapError>;
