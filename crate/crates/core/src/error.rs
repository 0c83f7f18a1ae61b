use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("derivative of order {required} required, function provides at most {available}")]
    InsufficientOrder { required: usize, available: usize },

    #[error("node list is empty")]
    EmptyNodes,

    #[error("non-finite node {0}")]
    NonFiniteNode(f64),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("spectrum is invalid: {0}")]
    InvalidSpectrum(String),

    #[error("node {node} is not strictly inside the contour (center {center}, radius {radius})")]
    OutsideContour { node: f64, center: f64, radius: f64 },

    #[error("function has no square companion g with f(x) = g(x^2)")]
    MissingSquareCompanion,

    #[error("function has no Laplace-Stieltjes measure")]
    MissingMeasure,

    #[error("function cannot be evaluated at complex arguments")]
    NotAnalytic,

    #[error("tuple budget exceeded: {tuples} index tuples > budget {budget}")]
    BudgetExceeded { tuples: u128, budget: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
