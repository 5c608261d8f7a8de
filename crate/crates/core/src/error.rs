use thiserror::Error;

use crate::expr::ExprError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected n = {expected}, got n = {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("coordinate vector of length {0} does not describe a point of H_n (need 2n + 1)")]
    BadCoordinateLength(usize),

    #[error("contact vectors are based at different points")]
    BaseMismatch,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("direction is not a unit vector (norm {0})")]
    NonUnitDirection(f64),

    #[error("singular point: p-area density {density:e} is below the singular tolerance")]
    SingularPoint { density: f64 },

    #[error("point outside the domain: {0}")]
    OutOfDomain(String),

    #[error("non-finite integrand value at {0}")]
    NonFinite(String),

    #[error("Monte Carlo estimate requested with zero samples")]
    EmptySample,

    #[error("invalid surface: {0}")]
    InvalidSurface(String),

    #[error("surface schema error at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },

    #[error(transparent)]
    Expr(#[from] ExprError),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
