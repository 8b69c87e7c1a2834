//! Degree-`d` extremal constants
//! `Λ_d(x) = max{|P(x)| : P ∈ 𝒫_d, max_γ |P| ≤ 1}` on a sampled curve, and
//! hull classification by the growth of `log Λ_d / d`.

mod lawson;
mod module_norm;
mod oracle;
mod scan;

use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::polynomial::monomials_up_to;
use crate::series::SampledCurve;
use crate::{Complex, Error, Result};

pub use lawson::{lawson, EvaluationBasis, Functional, LawsonOptions, LawsonSolution, RANK_TOL, UNBOUNDED_RESIDUAL};
pub use module_norm::{module_norm, module_norm_sweep, ModuleNormResult, MODULE_RANK_TOL};
pub use oracle::{lp_extremal, oracle_lambda_d, oracle_module_norm, OracleResult, ORACLE_MAX_DEGREE};
pub use scan::{fmt_real, hull_scan, scan_csv, GridSpec, ScanOptions, ScanRow};

/// Points this close to a curve sample get `Λ_d = 1` without solving.
pub const ON_CURVE_TOL: f64 = 1e-9;
pub const DEFAULT_LADDER: [u32; 4] = [4, 8, 16, 32];
pub const DEFAULT_IN_TOL: f64 = 0.01;
pub const DEFAULT_OUT_MARGIN: f64 = 0.05;

/// Smallest sample count accepted for degree `d`.
pub fn required_samples(d: u32) -> usize {
    8 * d as usize + 16
}

/// Power-of-two sample count for a degree ladder topping out at `d_max`.
pub fn default_samples(d_max: u32) -> usize {
    required_samples(d_max).next_power_of_two().max(256)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalResult {
    pub degree: u32,
    /// `log Λ_d`; `+∞` when some polynomial vanishes on the samples but
    /// not at the point.
    pub log_lambda: f64,
    /// Dual upper bound from the final Lawson weights.
    pub log_upper: f64,
    /// Coordinates of the extremal polynomial (normalized to `P(x) = 1`) in
    /// the evaluation-orthonormal basis.
    pub extremal_coeffs: Vec<Complex>,
    /// Values of that polynomial at the samples.
    pub sample_values: Vec<Complex>,
    pub dual_weights: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub unbounded: bool,
    /// Numerical rank of the evaluation matrix.
    pub rank: usize,
}

impl ExtremalResult {
    pub fn lambda(&self) -> f64 {
        self.log_lambda.exp()
    }

    /// `max (1 − |P_j| / sup)` over samples carrying at least `threshold`
    /// of the dual weight.
    pub fn duality_residual(&self, threshold: f64) -> f64 {
        let sup = self.sample_values.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if sup == 0.0 {
            return 0.0;
        }
        self.sample_values
            .iter()
            .zip(&self.dual_weights)
            .filter(|(_, &w)| w >= threshold)
            .map(|(z, _)| 1.0 - z.norm() / sup)
            .fold(0.0, f64::max)
    }

    fn trivial(degree: u32, samples: usize, hit: usize, rank: usize) -> Self {
        let mut dual_weights = vec![0.0; samples];
        dual_weights[hit] = 1.0;
        Self {
            degree,
            log_lambda: 0.0,
            log_upper: 0.0,
            extremal_coeffs: Vec::new(),
            sample_values: vec![Complex::new(1.0, 0.0); samples],
            dual_weights,
            iterations: 0,
            converged: true,
            unbounded: false,
            rank,
        }
    }

    fn unbounded(degree: u32, samples: usize, rank: usize) -> Self {
        Self {
            degree,
            log_lambda: f64::INFINITY,
            log_upper: f64::INFINITY,
            extremal_coeffs: Vec::new(),
            sample_values: Vec::new(),
            dual_weights: vec![1.0 / samples as f64; samples],
            iterations: 0,
            converged: true,
            unbounded: true,
            rank,
        }
    }
}

/// Solves a prepared basis against a functional; `Λ ≥ 1` is enforced by the
/// constant polynomial, which every caller's space contains.
pub(crate) fn solve_functional(
    degree: u32,
    basis: &EvaluationBasis,
    v: &[Complex],
    opts: &LawsonOptions,
) -> Result<ExtremalResult> {
    let f = basis.functional(v)?;
    if f.is_unbounded() {
        return Ok(ExtremalResult::unbounded(degree, basis.samples(), basis.rank()));
    }
    let sol = lawson(basis.q(), &f.coords, 0.0, opts)?;
    Ok(ExtremalResult {
        degree,
        log_lambda: sol.log_lower,
        log_upper: sol.log_upper.max(sol.log_lower),
        extremal_coeffs: sol.coords,
        sample_values: sol.values,
        dual_weights: sol.weights,
        iterations: sol.iterations,
        converged: sol.converged,
        unbounded: false,
        rank: basis.rank(),
    })
}

/// Evaluation matrix of the monomials `ζ^n w^m`, `n + m ≤ d`, at the
/// curve samples, in [`monomials_up_to`] order.
pub fn monomial_matrix(curve: &SampledCurve, d: u32) -> DMatrix<Complex> {
    let mons = monomials_up_to(d);
    let mut m = DMatrix::zeros(curve.len(), mons.len());
    for (j, (&z, &w)) in curve.zeta().iter().zip(curve.w()).enumerate() {
        let zp = power_table(z, d);
        let wp = power_table(w, d);
        for (i, &(n, k)) in mons.iter().enumerate() {
            m[(j, i)] = zp[n as usize] * wp[k as usize];
        }
    }
    m
}

/// Point-evaluation functional `(x_ζ^n x_w^m)` in [`monomials_up_to`] order.
pub fn monomial_functional(x: (Complex, Complex), d: u32) -> Vec<Complex> {
    let zp = power_table(x.0, d);
    let wp = power_table(x.1, d);
    monomials_up_to(d)
        .into_iter()
        .map(|(n, m)| zp[n as usize] * wp[m as usize])
        .collect()
}

fn power_table(z: Complex, d: u32) -> Vec<Complex> {
    let mut t = Vec::with_capacity(d as usize + 1);
    let mut acc = Complex::new(1.0, 0.0);
    for _ in 0..=d {
        t.push(acc);
        acc *= z;
    }
    t
}

/// The orthonormalized monomial basis of `𝒫_d` on one curve, reusable
/// across evaluation points.
#[derive(Debug, Clone)]
pub struct ExtremalProblem {
    degree: u32,
    zeta: Vec<Complex>,
    w: Vec<Complex>,
    basis: EvaluationBasis,
}

impl ExtremalProblem {
    pub fn new(curve: &SampledCurve, d: u32) -> Result<Self> {
        let needed = required_samples(d);
        if curve.len() < needed {
            return Err(Error::UnderResolved(format!(
                "degree {d} needs {needed} samples, curve has {}",
                curve.len()
            )));
        }
        let basis = EvaluationBasis::new(monomial_matrix(curve, d), RANK_TOL)?;
        if basis.rank() > curve.len() / 2 {
            return Err(Error::UnderResolved(format!(
                "degree {d} has numerical rank {} on {} samples",
                basis.rank(),
                curve.len()
            )));
        }
        Ok(Self {
            degree: d,
            zeta: curve.zeta().to_vec(),
            w: curve.w().to_vec(),
            basis,
        })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn rank(&self) -> usize {
        self.basis.rank()
    }

    pub fn solve(&self, x: (Complex, Complex), opts: &LawsonOptions) -> Result<ExtremalResult> {
        if !(x.0.is_finite() && x.1.is_finite()) {
            return Err(Error::NonFinite("evaluation point"));
        }
        let hit = self.zeta.iter().zip(&self.w).position(|(&z, &w)| {
            ((z - x.0).norm_sqr() + (w - x.1).norm_sqr()).sqrt() < ON_CURVE_TOL
        });
        if let Some(j) = hit {
            return Ok(ExtremalResult::trivial(self.degree, self.zeta.len(), j, self.rank()));
        }
        solve_functional(self.degree, &self.basis, &monomial_functional(x, self.degree), opts)
    }
}

pub fn lambda_d(curve: &SampledCurve, x: (Complex, Complex), d: u32, opts: &LawsonOptions) -> Result<ExtremalResult> {
    ExtremalProblem::new(curve, d)?.solve(x, opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HullVerdict {
    InHull,
    OutOfHull,
    Uncertain,
}

impl HullVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            HullVerdict::InHull => "in_hull",
            HullVerdict::OutOfHull => "out_of_hull",
            HullVerdict::Uncertain => "uncertain",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    /// Largest per-doubling rise of `log Λ_d / d` still read as bounded.
    pub in_tol: f64,
    /// Smallest per-doubling rise read as divergence.
    pub out_margin: f64,
    pub lawson: LawsonOptions,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            in_tol: DEFAULT_IN_TOL,
            out_margin: DEFAULT_OUT_MARGIN,
            lawson: LawsonOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HullClassification {
    pub point: (Complex, Complex),
    pub degrees: Vec<u32>,
    /// `log Λ_d`, made nondecreasing along the ladder.
    pub log_lambdas: Vec<f64>,
    /// `log Λ_d / d`.
    pub slopes: Vec<f64>,
    /// Least-squares slope of `log Λ_d` against `d` over the top half.
    pub fitted_slope: f64,
    pub verdict: HullVerdict,
    /// `exp(fitted_slope)`: the per-degree growth factor with the
    /// intercept removed.
    pub c_estimate: f64,
    pub converged_all: bool,
}

fn check_ladder(ladder: &[u32]) -> Result<()> {
    if ladder.len() < 3 || ladder[0] == 0 || ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput(
            "degree ladder must be strictly increasing, positive, and of length ≥ 3".into(),
        ));
    }
    Ok(())
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    if ys.iter().any(|y| y.is_infinite()) {
        return f64::INFINITY;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Turns per-degree results along a ladder into a verdict.
///
/// `in_hull`: on the top half of the ladder `log Λ_d / d` never rises by more
/// than `in_tol` per step. `out_of_hull`: some `Λ_d` is infinite, or the
/// slope rises by more than `out_margin` at every step. Anything else, both
/// firing, or any non-converged run is `uncertain`.
pub fn classify_results(
    point: (Complex, Complex),
    results: &[ExtremalResult],
    opts: &ClassifyOptions,
) -> HullClassification {
    let degrees: Vec<u32> = results.iter().map(|r| r.degree).collect();
    let mut log_lambdas = Vec::with_capacity(results.len());
    let mut running = 0.0f64;
    for r in results {
        running = running.max(r.log_lambda);
        log_lambdas.push(running);
    }
    let slopes: Vec<f64> = log_lambdas
        .iter()
        .zip(&degrees)
        .map(|(l, &d)| l / d as f64)
        .collect();
    let start = results.len() - ((results.len() + 1) / 2).max(2);
    let xs: Vec<f64> = degrees[start..].iter().map(|&d| d as f64).collect();
    let fitted_slope = least_squares_slope(&xs, &log_lambdas[start..]);
    let converged_all = results.iter().all(|r| r.converged);

    let any_infinite = log_lambdas.iter().any(|l| l.is_infinite());
    let rises: Vec<f64> = slopes.windows(2).map(|w| w[1] - w[0]).collect();
    let in_hull = !any_infinite && rises[start..].iter().all(|&r| r <= opts.in_tol);
    let out = any_infinite || rises.iter().all(|&r| r > opts.out_margin);
    let verdict = if !converged_all || in_hull == out {
        HullVerdict::Uncertain
    } else if in_hull {
        HullVerdict::InHull
    } else {
        HullVerdict::OutOfHull
    };
    HullClassification {
        point,
        degrees,
        log_lambdas,
        slopes,
        fitted_slope,
        verdict,
        c_estimate: fitted_slope.exp(),
        converged_all,
    }
}

pub fn classify_point(
    curve: &SampledCurve,
    x: (Complex, Complex),
    ladder: &[u32],
    opts: &ClassifyOptions,
) -> Result<HullClassification> {
    check_ladder(ladder)?;
    let results = ladder
        .par_iter()
        .map(|&d| lambda_d(curve, x, d, &opts.lawson))
        .collect::<Result<Vec<_>>>()?;
    Ok(classify_results(x, &results, opts))
}

/// One prepared problem per ladder degree, shared between points.
pub fn prepare_ladder(curve: &SampledCurve, ladder: &[u32]) -> Result<Vec<Arc<ExtremalProblem>>> {
    check_ladder(ladder)?;
    ladder
        .par_iter()
        .map(|&d| ExtremalProblem::new(curve, d).map(Arc::new))
        .collect()
}

pub fn classify_prepared(
    problems: &[Arc<ExtremalProblem>],
    x: (Complex, Complex),
    opts: &ClassifyOptions,
) -> Result<HullClassification> {
    let results = problems
        .iter()
        .map(|p| p.solve(x, &opts.lawson))
        .collect::<Result<Vec<_>>>()?;
    Ok(classify_results(x, &results, opts))
}
