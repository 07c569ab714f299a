use thiserror::Error;

use crate::quantity::Dimension;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: Dimension, found: Dimension },

    #[error("cannot take square root of dimension {0} (odd exponent)")]
    OddRoot(Dimension),

    #[error("unknown unit symbol `{0}`")]
    UnknownUnit(String),

    #[error("malformed unit string `{0}`")]
    MalformedUnit(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("quadrature did not converge: estimate {estimate:e}, error {error_estimate:e} after {intervals} subintervals")]
    Quadrature { estimate: f64, error_estimate: f64, intervals: usize },

    #[error("smearing length a = {a:e} cm is below the lattice spacing {spacing:e} cm; refine the lattice or increase a")]
    UnresolvedSmearing { a: f64, spacing: f64 },

    #[error("time step too large: {0}")]
    StepTooLarge(String),

    #[error("state norm underflow ({norm:e}) at step {step}; trajectory aborted")]
    NormUnderflow { norm: f64, step: usize },

    #[error("density matrix lost positivity: minimum eigenvalue {min_eigenvalue:e}, trace {trace}")]
    Positivity { min_eigenvalue: f64, trace: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() || value <= 0.0 {
        return Err(Error::InvalidParameter { name, reason: format!("must be positive and finite, got {value:e}") });
    }
    Ok(())
}

pub(crate) fn ensure_non_negative(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() || value < 0.0 {
        return Err(Error::InvalidParameter { name, reason: format!("must be non-negative and finite, got {value:e}") });
    }
    Ok(())
}
