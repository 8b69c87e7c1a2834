use thiserror::Error;

use crate::Complex;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("singular point at ζ = {0}")]
    SingularPoint(Complex),

    #[error("decay certificate needs R > 4 (got R = {0})")]
    InvalidCert(f64),

    #[error("degree {degree} needs stored support to total degree {required}, series stops at {available}")]
    InsufficientTerms {
        degree: u32,
        required: u32,
        available: u32,
    },

    #[error("under-resolved: {0}")]
    UnderResolved(String),

    #[error("|τ| = {0:e} is below 1e-8; the witness family cannot separate this point")]
    TauVanishes(f64),

    #[error("φ has a pole on the unit circle at ζ = {0}")]
    PoleOnContour(Complex),

    #[error("|ζ₀| = {0} is within 1e-3 of the unit circle")]
    TooCloseToBoundary(f64),

    #[error("membership bound violated at degree {degree}: log ratio {log_ratio} > bound {log_bound}")]
    BoundViolated {
        degree: u32,
        log_ratio: f64,
        log_bound: f64,
        polynomial: crate::BivariatePolynomial,
    },

    #[error("evaluation functional vanishes on the whole basis")]
    DegenerateConstraint,

    #[error("linear program reported infeasible")]
    InfeasibleLp,

    #[error("measure fails the annihilation conditions: {0}")]
    AnnihilationViolated(String),

    #[error("1 + h vanishes near ζ = {0}")]
    NearPole(Complex),

    #[error("1 + h has a root within 1e-8 of the unit circle at ζ = {0}")]
    RootOnBoundary(Complex),

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),
}

impl Error {
    /// Errors that signal a broken numerical contract rather than bad input.
    pub fn is_contract_violation(&self) -> bool {
        matches!(
            self,
            Error::BoundViolated { .. }
                | Error::DegenerateConstraint
                | Error::InfeasibleLp
                | Error::LinearAlgebra(_)
        )
    }
}

pub(crate) fn ensure_finite(z: Complex, what: &'static str) -> Result<Complex> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite(what))
    }
}
