//! Norm of the evaluation functional on the module `{a + bφ}` over
//! polynomials `a, b` of degree ≤ `d`, with the sup norm on Γ.

use nalgebra::DMatrix;

use super::{required_samples, solve_functional, EvaluationBasis, LawsonOptions};
use crate::series::SampledCurve;
use crate::{Complex, Error, Result};

/// Rank tolerance for the two-family basis `{ζ^n} ∪ {ζ^n φ}`.
pub const MODULE_RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ModuleNormResult {
    pub degree: u32,
    /// `log M_x(d)`; `+∞` when some `a + bφ` vanishes on Γ but not at `x`.
    pub log_norm: f64,
    pub rank: usize,
    /// The two families are numerically dependent on Γ.
    pub rank_deficient: bool,
    pub unbounded: bool,
    pub converged: bool,
    pub iterations: usize,
}

impl ModuleNormResult {
    pub fn value(&self) -> f64 {
        self.log_norm.exp()
    }
}

/// Columns `ζ^n` then `ζ^n φ(ζ)` for `n = 0..=d` at the curve samples.
pub fn module_matrix(curve: &SampledCurve, d: u32) -> DMatrix<Complex> {
    let k = d as usize + 1;
    DMatrix::from_fn(curve.len(), 2 * k, |j, i| {
        let z = curve.zeta()[j];
        if i < k {
            z.powu(i as u32)
        } else {
            z.powu((i - k) as u32) * curve.w()[j]
        }
    })
}

pub fn module_functional(phi_at_x: Complex, x_zeta: Complex, d: u32) -> Vec<Complex> {
    let powers: Vec<Complex> = (0..=d).map(|n| x_zeta.powu(n)).collect();
    powers
        .iter()
        .copied()
        .chain(powers.iter().map(|p| p * phi_at_x))
        .collect()
}

pub(crate) fn check_module_input(curve: &SampledCurve, phi_at_x: Complex, x_zeta: Complex, d: u32) -> Result<()> {
    if !(x_zeta.norm() < 1.0) {
        return Err(Error::InvalidInput(format!("|x| = {} must be < 1", x_zeta.norm())));
    }
    if !phi_at_x.is_finite() {
        return Err(Error::NonFinite("φ(x)"));
    }
    let needed = required_samples(d);
    if curve.len() < needed {
        return Err(Error::UnderResolved(format!(
            "degree {d} needs {needed} samples, curve has {}",
            curve.len()
        )));
    }
    Ok(())
}

/// `max{|a(x) + b(x) φ(x)| : deg a, deg b ≤ d, max_Γ |a + bφ| ≤ 1}`.
pub fn module_norm(
    curve: &SampledCurve,
    phi_at_x: Complex,
    x_zeta: Complex,
    d: u32,
    opts: &LawsonOptions,
) -> Result<ModuleNormResult> {
    check_module_input(curve, phi_at_x, x_zeta, d)?;
    let basis = EvaluationBasis::new(module_matrix(curve, d), MODULE_RANK_TOL)?;
    let r = solve_functional(d, &basis, &module_functional(phi_at_x, x_zeta, d), opts)?;
    Ok(ModuleNormResult {
        degree: d,
        log_norm: r.log_lambda,
        rank: basis.rank(),
        rank_deficient: basis.rank() < basis.columns(),
        unbounded: r.unbounded,
        converged: r.converged,
        iterations: r.iterations,
    })
}

/// [`module_norm`] over increasing degrees, with the running maximum
/// applied since the feasible set only grows with `d`.
pub fn module_norm_sweep(
    curve: &SampledCurve,
    phi_at_x: Complex,
    x_zeta: Complex,
    degrees: &[u32],
    opts: &LawsonOptions,
) -> Result<Vec<ModuleNormResult>> {
    if degrees.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("degrees must be strictly increasing".into()));
    }
    let mut out: Vec<ModuleNormResult> = Vec::with_capacity(degrees.len());
    for &d in degrees {
        let mut r = module_norm(curve, phi_at_x, x_zeta, d, opts)?;
        if let Some(prev) = out.last() {
            r.log_norm = r.log_norm.max(prev.log_norm);
        }
        out.push(r);
    }
    Ok(out)
}
