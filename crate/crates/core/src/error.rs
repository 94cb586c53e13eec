use thiserror::Error;

/// Errors raised by the hypercube, search and channel routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} = {value} is outside its domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("dimension {0} is outside 1..={max}", max = crate::hypercube::MAX_DIMENSION)]
    Dimension(usize),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("vertex {vertex} does not fit in dimension {dimension}")]
    VertexOutOfRange { vertex: u32, dimension: usize },
    #[error("the vertex set is empty")]
    EmptySet,
    #[error("invalid probability mass function: {0}")]
    InvalidPmf(String),
    #[error("coordinate {coordinate} is outside 1..={dimension}")]
    Coordinate { coordinate: usize, dimension: usize },
    #[error("{0}")]
    Precondition(String),
    #[error("enumeration budget exceeded for {what}: needs {required}, limit {limit}")]
    Budget {
        what: &'static str,
        required: u128,
        limit: u128,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
