use std::fmt;

/// Errors raised by samplers, models and calculators.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter is outside its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// Pólya-Gamma shapes other than 1 are not implemented.
    #[error("unsupported Polya-Gamma shape a = {0} (only a = 1 is implemented)")]
    UnsupportedShape(f64),
    /// Two truncated normals were compared on different half-lines.
    #[error("truncated-normal sides differ")]
    SideMismatch,
    /// A divergence or density is undefined at the requested point.
    #[error("domain error: {0}")]
    Domain(String),
    /// A matrix that must be symmetric positive definite is not.
    #[error("matrix is not positive definite: {0}")]
    NotSpd(String),
    /// The chain produced a value that can no longer be represented.
    #[error("numeric breakdown: {0}")]
    Breakdown(String),
    /// An iterative solver ran out of iterations.
    #[error("no convergence: {0}")]
    NoConvergence(String),
    /// A dataset violates a model requirement.
    #[error("invalid data: {0}")]
    Data(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(msg: impl fmt::Display) -> Self {
        Error::InvalidParameter(msg.to_string())
    }

    pub(crate) fn data(msg: impl fmt::Display) -> Self {
        Error::Data(msg.to_string())
    }
}
