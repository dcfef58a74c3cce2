//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside its admissible domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// Evaluation requested exactly on a jump discontinuity.
    #[error("symbol evaluated on the jump at t = {0}")]
    OnJump(f64),
    /// The quadrature could not reach the requested tolerance.
    #[error("quadrature tolerance {requested:e} not reached within the panel budget; achieved {achieved:e}")]
    Quadrature { requested: f64, achieved: f64 },
    /// A computation needs more moments than were supplied.
    #[error("need moments up to index {needed}, have {available}")]
    InsufficientMoments { needed: usize, available: usize },
    /// Verblunsky coefficient too close to the unit circle for the working precision.
    #[error("precision exhausted at recursion step {step}: 1 - |alpha| = {gap:e}")]
    PrecisionExhausted { step: usize, gap: f64 },
    /// A quantity that must be positive was not (usually a precision failure).
    #[error("positivity violated: {0}")]
    Positivity(String),
    /// An imaginary part that must vanish did not.
    #[error("imaginary residue {0:e} exceeds tolerance")]
    ComplexResidue(f64),
    /// Linear system too ill-conditioned at the working precision.
    #[error("ill-conditioned system: {0}")]
    IllConditioned(String),
    /// Sampling or eigen-solver failure.
    #[error("sampling failure: {0}")]
    Sampling(String),
    /// Malformed input data.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
