use thiserror::Error;

/// Errors raised by the analysis and testing routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected n = {expected}, got n = {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension n = {0} is not supported (must be in 1..={max})", max = crate::MAX_DIMENSION)]
    UnsupportedDimension(usize),

    #[error("coordinate {coordinate} is out of range 1..={n}")]
    CoordinateOutOfRange { coordinate: usize, n: usize },

    #[error("invalid truth table: {0}")]
    InvalidTable(String),

    #[error("function is not folded (f(1+x) = -f(x) fails at index {index})")]
    NotFolded { index: usize },

    #[error("enumeration needs {needed} random bits but the guard allows {allowed}")]
    GuardExceeded { needed: u32, allowed: u32 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid hypergraph: {0}")]
    InvalidHypergraph(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("numerical invariant violated: {0}")]
    Numerical(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
