use thiserror::Error;

/// Errors raised anywhere in the regularization pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Caller passed inconsistent data (dimension mismatch, empty set, bad index).
    #[error("input error: {0}")]
    Input(String),

    /// A problem or matrix file could not be decoded.
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    /// The exact oracle refuses the requested size.
    #[error("capability error: {0}")]
    Capability(String),

    /// The LP engine failed numerically.
    #[error("solver error: {0}")]
    Solver(String),

    /// An extracted certificate does not satisfy its stationarity system.
    #[error("certificate error: stationarity residual {residual:.3e} exceeds {tolerance:.1e}")]
    Certificate { residual: f64, tolerance: f64 },

    /// A ledger invariant failed while it was being built.
    #[error("ledger error: {0}")]
    Ledger(String),

    /// The instance generator could not satisfy the planting constraints.
    #[error("generator error: {0}")]
    Generator(String),

    /// A situation the algorithms rule out by construction.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse { location: location.into(), message: message.into() }
    }
}
