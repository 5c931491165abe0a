//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A constructor precondition was violated.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An acceptance ratio was requested at a state with zero density.
    #[error("undefined density: {0}")]
    UndefinedDensity(String),

    /// Exact enumeration would exceed the desk-scale budget.
    #[error("enumeration budget exceeded: {0}")]
    EnumerationBudget(String),

    /// Two finite chains were compared over different grids.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// An operation that requires reversibility got a non-reversible chain.
    #[error("chain not reversible: {0}")]
    NotReversible(String),

    #[error("quadrature failed to converge: {0}")]
    QuadratureNonconvergence(String),

    #[error("trace too short: {0}")]
    TraceTooShort(String),

    /// A check was asked to run on a model it does not apply to.
    #[error("check not applicable: {0}")]
    NotApplicable(String),

    /// Declarative config rejected; `path` points at the offending field.
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(path: &str, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.to_string(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
