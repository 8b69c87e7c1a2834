//! Bi-power series `Φ(z, w) = Σ a_nm z^n w^m`, their diagonal restriction
//! `φ(ζ) = Φ(ζ, ζ̄)`, other `φ` descriptors, and sampled boundary curves.

mod bi_series;
mod curve;
mod descriptor;
pub mod io;
mod laurent;

pub use bi_series::{crossover_degree, required_support, BiPowerSeries, DecayCert, TailBound};
pub use curve::{sample_curve, SampledCurve};
pub use descriptor::{PhiDescriptor, PhiKind, BUILTIN_NAMES};
pub use laurent::LaurentPoly;

use crate::{Complex, Result};

/// `φ(ζ)` for any descriptor.
pub fn eval_phi(desc: &PhiDescriptor, zeta: Complex) -> Result<Complex> {
    desc.eval(zeta)
}

/// `C_R (4/R)^d` together with the refined bound and regime flag.
pub fn tail_bound(s: &BiPowerSeries, d: u32, cert_index: usize) -> Result<TailBound> {
    s.tail_bound(d, cert_index)
}

/// `ε_d(ζ) = Σ_{n+m>d} a_nm ζ^n ζ̄^m` over stored terms.
pub fn eps_d(s: &BiPowerSeries, d: u32, zeta: Complex) -> Result<Complex> {
    s.eps_d(d, zeta)
}
