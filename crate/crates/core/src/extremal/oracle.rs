//! Independent check of the Lawson engine by linear programming.
//!
//! Each modulus constraint `|P_j| ≤ 1` is replaced by the circumscribed
//! `L`-gon `Re(e^{-iφ_l} P_j) ≤ 1`, and `|P(x)|` by `Re(e^{-iθ_q} P(x))`
//! maximized over a grid of `θ_q`. The LP value `V` then satisfies
//! `Λ cos(π/L) ≤ V ≤ Λ / cos(π/L)`.

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::DMatrix;

use super::module_norm::{check_module_input, module_functional, module_matrix};
use super::{monomial_functional, monomial_matrix};
use crate::numeric::unit_root;
use crate::series::SampledCurve;
use crate::{Complex, Error, Result};

pub const ORACLE_MAX_DEGREE: u32 = 3;
pub const MIN_PHASES: usize = 16;
/// Box on every real unknown after column equilibration. It keeps each LP
/// bounded even when some combination of columns vanishes on the samples
/// only up to rounding.
pub const COEFF_BOX: f64 = 1e9;
/// LP values beyond this can only come from coefficients pushed against
/// the box, and are reported as unbounded.
pub const UNBOUNDED_VALUE: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    /// Largest LP value over the objective phases.
    pub value: f64,
    pub log_value: f64,
    /// `cos(π/L)`: the value is within this factor of the true constant.
    pub correction: f64,
    pub unbounded: bool,
}

/// Phase-discretized LP for `max{|ℓ(P)| : max_j |P_j| ≤ 1}` over the span
/// of the columns of `values`, with `ℓ(Σ c_i f_i) = Σ v_i c_i`.
pub fn lp_extremal(values: &DMatrix<Complex>, v: &[Complex], phase_count: usize) -> Result<OracleResult> {
    if phase_count < MIN_PHASES {
        return Err(Error::InvalidInput(format!("phase_count must be ≥ {MIN_PHASES}")));
    }
    if v.len() != values.ncols() {
        return Err(Error::InvalidInput("functional length mismatch".into()));
    }
    let mut values = values.clone();
    let mut v = v.to_vec();
    let n = values.nrows() as f64;
    for (mut col, vi) in values.column_iter_mut().zip(v.iter_mut()) {
        let rms = (col.iter().map(|z| z.norm_sqr()).sum::<f64>() / n).sqrt();
        if rms > 0.0 {
            col.unscale_mut(rms);
            *vi /= rms;
        }
    }
    let phases: Vec<Complex> = (0..phase_count).map(|l| unit_root(l, phase_count)).collect();
    let mut best = f64::NEG_INFINITY;
    for theta in &phases {
        let value = solve_phase(&values, &v, *theta, &phases)?;
        best = best.max(value);
        if value > UNBOUNDED_VALUE {
            break;
        }
    }
    Ok(OracleResult {
        value: best,
        log_value: best.ln(),
        correction: (std::f64::consts::PI / phase_count as f64).cos(),
        unbounded: best > UNBOUNDED_VALUE,
    })
}

/// `Re(e^{-iψ} Σ c_i a_i)` as coefficients on `(Re c_i, Im c_i)`.
fn real_part_row(a: impl Iterator<Item = Complex>, rot: Complex) -> Vec<(f64, f64)> {
    a.map(|z| {
        let r = rot.conj() * z;
        (r.re, -r.im)
    })
    .collect()
}

fn solve_phase(values: &DMatrix<Complex>, v: &[Complex], theta: Complex, phases: &[Complex]) -> Result<f64> {
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    // Each real unknown is split as t⁺ − t⁻ with 0 ≤ t± ≤ COEFF_BOX; the
    // solver loses track of free variables along exactly repeated columns.
    let nonneg = (0.0, COEFF_BOX);
    let vars: Vec<_> = real_part_row(v.iter().copied(), theta)
        .into_iter()
        .flat_map(|(a, b)| [a, b])
        .map(|obj| (lp.add_var(obj, nonneg), lp.add_var(-obj, nonneg)))
        .collect();
    for row in values.row_iter() {
        for &phase in phases {
            let coeffs = real_part_row(row.iter().copied(), phase);
            let expr: Vec<_> = vars
                .iter()
                .zip(coeffs.iter().flat_map(|&(a, b)| [a, b]))
                .flat_map(|(&(plus, minus), a)| [(plus, a), (minus, -a)])
                .collect();
            lp.add_constraint(expr.as_slice(), ComparisonOp::Le, 1.0);
        }
    }
    match lp.solve() {
        Ok(sol) if sol.objective().is_finite() => Ok(sol.objective()),
        Ok(sol) => Err(Error::LinearAlgebra(format!("LP objective {}", sol.objective()))),
        Err(minilp::Error::Unbounded) => Ok(f64::INFINITY),
        Err(minilp::Error::Infeasible) => Err(Error::InfeasibleLp),
    }
}

fn check_degree(d: u32) -> Result<()> {
    if d > ORACLE_MAX_DEGREE {
        return Err(Error::InvalidInput(format!(
            "oracle degree {d} exceeds {ORACLE_MAX_DEGREE}"
        )));
    }
    Ok(())
}

pub fn oracle_lambda_d(curve: &SampledCurve, x: (Complex, Complex), d: u32, phase_count: usize) -> Result<OracleResult> {
    check_degree(d)?;
    lp_extremal(&monomial_matrix(curve, d), &monomial_functional(x, d), phase_count)
}

pub fn oracle_module_norm(
    curve: &SampledCurve,
    phi_at_x: Complex,
    x_zeta: Complex,
    d: u32,
    phase_count: usize,
) -> Result<OracleResult> {
    check_degree(d)?;
    check_module_input(curve, phi_at_x, x_zeta, d)?;
    lp_extremal(&module_matrix(curve, d), &module_functional(phi_at_x, x_zeta, d), phase_count)
}
