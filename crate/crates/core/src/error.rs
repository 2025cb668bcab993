use alloc::string::String;

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch in {op}: {}x{} vs {}x{}", left.0, left.1, right.0, right.1)]
    Shape {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix must be non-empty, got {rows}x{cols}")]
    EmptyMatrix { rows: usize, cols: usize },
    #[error("matrix {rows}x{cols} needs {} values, got {len}", rows * cols)]
    DataLength {
        rows: usize,
        cols: usize,
        len: usize,
    },
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("empty data: {0}")]
    EmptyData(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("label {0} is not binary (expected 0 or 1)")]
    InvalidLabel(u8),
    #[error("unknown class label {0:?}")]
    UnknownLabel(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}
