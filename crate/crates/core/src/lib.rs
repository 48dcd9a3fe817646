//! Thue–Morse along polynomial powers: witnesses, approximation pairs,
//! certified residuals, β-expansions and sequence statistics.

pub mod approx;
pub mod ball;
pub mod betaexp;
pub mod bits;
pub mod dyadic;
pub mod error;
pub mod field;
pub mod lemma;
pub mod poly;
pub mod seqstats;
mod serde_util;
pub mod tm;
pub mod witness;

pub use error::{Error, Result};

/// Integer polynomials.
pub type IntPoly = poly::Poly<num_bigint::BigInt>;
/// Rational polynomials.
pub type RatPoly = poly::Poly<num_rational::BigRational>;
