//! Numerical certificates for the projective hull of analytic graph curves
//! `γ = {(ζ, φ(ζ)) : |ζ| = 1}` in C².
//!
//! The crate is organised around the objects that decide whether a point
//! `x ∈ C²` satisfies `|P(x)| ≤ C_x^d · sup_γ |P|` for every polynomial of
//! degree `d`:
//!
//! - [`series`]: bi-power series `Φ(z, w)`, the diagonal restriction
//!   `φ(ζ) = Φ(ζ, ζ̄)`, certified tail bounds and curve sampling.
//! - [`witness`]: explicit exclusion polynomials `P_d` that are tiny on `γ`
//!   and large at interior graph points of non-holomorphic `φ`.
//! - [`membership`]: Cauchy-integral membership bounds for meromorphic `φ`
//!   with a pole at the origin.
//! - [`extremal`]: the extremal constants `Λ_d(x)` via Lawson iteration,
//!   hull classification, scans, module norms and an LP oracle.
//! - [`hardy`]: Fourier analysis on the circle and the measure-to-rational
//!   reconstruction pipeline.

pub mod error;
pub mod extremal;
pub mod hardy;
pub mod membership;
pub mod numeric;
pub mod polynomial;
pub mod series;
pub mod witness;

pub use error::{Error, Result};
pub use polynomial::BivariatePolynomial;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Complex scalar used throughout.
pub type Complex = num_complex::Complex64;
