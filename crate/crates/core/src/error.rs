use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A function sampled on a quadrature grid returned NaN or ±∞.
    #[error("non-finite value {value} at quadrature node {index} (phi = {phi})")]
    NonFinite { index: usize, phi: f64, value: f64 },

    /// The requested truncation leaves too much probability outside the basis.
    #[error(
        "insufficient dimension {dim}: tail mass {tail_mass:e} exceeds {limit:e}; \
         use at least {required}"
    )]
    InsufficientDimension {
        dim: usize,
        tail_mass: f64,
        limit: f64,
        required: usize,
    },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
