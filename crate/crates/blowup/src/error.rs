//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument fell outside the domain of a function or operation.
    #[error("domain violation: {0}")]
    Domain(String),

    /// A structural precondition of an operation does not hold
    /// (e.g. drift not non-decreasing, noise not identically zero).
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A function parameter was NaN or infinite where a finite value is required.
    #[error("non-finite parameter: {0}")]
    NonFiniteParam(String),

    /// Adaptive quadrature failed to reach the requested tolerance.
    #[error("quadrature did not converge over [{lo}, {hi}]: estimate {estimate}, error {error} > tol {tol}")]
    QuadratureNonConvergence {
        lo: f64,
        hi: f64,
        estimate: f64,
        error: f64,
        tol: f64,
    },

    /// An inversion target lies outside the attained range of the function.
    #[error("target {target} outside attained range [{attained_lo}, {attained_hi}]")]
    TargetOutOfRange {
        target: f64,
        attained_lo: f64,
        attained_hi: f64,
    },

    /// Sampled values violate the declared monotonicity (three-point check).
    #[error("non-monotone sample detected near x = {x}")]
    NonMonotone { x: f64 },

    /// A computed pair of results that must agree did not.
    #[error("inconsistent results: {0}")]
    Inconsistent(String),
}

impl Error {
    /// Process exit code the CLI maps this error to: 2 for domain and
    /// precondition violations, 3 for numerical non-convergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Precondition(_) | Error::NonFiniteParam(_) => 2,
            Error::QuadratureNonConvergence { .. }
            | Error::TargetOutOfRange { .. }
            | Error::NonMonotone { .. }
            | Error::Inconsistent(_) => 3,
        }
    }
}
