//! Exact and asymptotic multiplicative averages over the classical orthogonal
//! ensembles O⁺_{2n}, O⁻_{2n+2} and O^±_{2n+1}.
//!
//! Exact values come from Toeplitz+Hankel determinants and, independently, from
//! orthogonal polynomials on the unit circle. The `asym` module evaluates the
//! closed-form large-n predictions, and `mc` samples the ensembles directly.

pub mod error;
pub mod mp;
pub mod quad;
pub mod symbols;
pub mod moments;
pub mod linalg;
pub mod mc;
pub mod opuc;
pub mod special;
pub mod ensembles;
pub mod asym;

pub use error::{Error, Result};
