//! Boundary Fourier analysis for a measure `σ` on Γ that annihilates the
//! disk algebra (`∫ζ^n dσ = 0` for `n ≥ 1`, `∫dσ = 1`), and the resulting
//! rational reconstruction `φ = (α + k)/(1 + h)` with `h, k ∈ H¹₀`.
//!
//! Coefficients follow `c_n = ∫ e^{-inθ} f dθ/2π`, so the annihilation
//! conditions read `c_{-n} = 0` for `n ≥ 1` and `c_0 = 1`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, Schur};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::numeric::{horner, is_power_of_two, unit_root};
use crate::series::PhiDescriptor;
use crate::{Complex, Error, Result};

pub const ANNIHILATION_TOL: f64 = 1e-12;
pub const NEAR_POLE_TOL: f64 = 1e-12;
pub const ROOT_RESIDUAL_TOL: f64 = 1e-12;
/// Roots closer than this to Γ are rejected.
pub const BOUNDARY_BAND: f64 = 1e-8;
pub const DEFAULT_SAMPLES: usize = 1024;
pub const DEFAULT_TOL: f64 = 1e-8;

/// Two-sided coefficient list `c_n`, `|n| ≤ K`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoeffs {
    k: usize,
    values: Vec<Complex>,
}

impl FourierCoeffs {
    pub fn max_index(&self) -> usize {
        self.k
    }

    pub fn get(&self, n: i64) -> Complex {
        if n.unsigned_abs() as usize > self.k {
            Complex::new(0.0, 0.0)
        } else {
            self.values[(n + self.k as i64) as usize]
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex)> + '_ {
        let k = self.k as i64;
        self.values.iter().enumerate().map(move |(i, &c)| (i as i64 - k, c))
    }
}

fn fft(samples: &[Complex]) -> Vec<Complex> {
    let mut buf = samples.to_vec();
    FftPlanner::<f64>::new().plan_fft_forward(buf.len()).process(&mut buf);
    let n = buf.len() as f64;
    buf.iter_mut().for_each(|c| *c /= n);
    buf
}

/// `c_n = (1/N) Σ_j f(ζ_j) ζ_j^{-n}` for `|n| ≤ K`.
pub fn fourier_coeffs(samples: &[Complex], k: usize) -> Result<FourierCoeffs> {
    let n = samples.len();
    if !is_power_of_two(n) || n < 4 * k + 4 {
        return Err(Error::UnderResolved(format!(
            "{n} samples for K = {k}: need a power of two ≥ {}",
            4 * k + 4
        )));
    }
    let all = fft(samples);
    let values = (-(k as i64)..=k as i64)
        .map(|j| all[j.rem_euclid(n as i64) as usize])
        .collect();
    Ok(FourierCoeffs { k, values })
}

/// `ℓ²` norm of the coefficients at `n = −1, …, −N/2` of sampled data.
pub fn negative_frequency_mass(samples: &[Complex]) -> Result<f64> {
    let n = samples.len();
    if !is_power_of_two(n) || n < 4 {
        return Err(Error::UnderResolved(format!("{n} samples: need a power of two ≥ 4")));
    }
    let all = fft(samples);
    Ok(all[n / 2..].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt())
}

/// `N` samples of `f` at the roots of unity.
pub fn sample_on_circle(n: usize, f: impl Fn(Complex) -> Result<Complex>) -> Result<Vec<Complex>> {
    (0..n).map(|j| f(unit_root(j, n))).collect()
}

/// A measure on Γ with a trigonometric-polynomial density.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleMeasure {
    coeffs: BTreeMap<i64, Complex>,
}

#[derive(Serialize, Deserialize)]
struct MeasureWire {
    coeffs: Vec<(i64, f64, f64)>,
}

impl CircleMeasure {
    pub fn new<I: IntoIterator<Item = (i64, Complex)>>(coeffs: I) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (n, c) in coeffs {
            if !c.is_finite() {
                return Err(Error::NonFinite("measure coefficient"));
            }
            if map.insert(n, c).is_some() {
                return Err(Error::InvalidInput(format!("duplicate coefficient index {n}")));
            }
        }
        Ok(Self { coeffs: map })
    }

    /// `dθ/2π`.
    pub fn uniform() -> Self {
        Self::new([(0, Complex::new(1.0, 0.0))]).expect("finite")
    }

    /// Density `1 + Σ_{n≥1} h_n ζ^n`, with `h[0]` the coefficient of `ζ`.
    pub fn from_positive_density(h: &[Complex]) -> Result<Self> {
        Self::new(
            std::iter::once((0, Complex::new(1.0, 0.0)))
                .chain(h.iter().enumerate().map(|(i, &c)| (i as i64 + 1, c))),
        )
    }

    pub fn coeff(&self, n: i64) -> Complex {
        self.coeffs.get(&n).copied().unwrap_or_default()
    }

    pub fn max_index(&self) -> usize {
        self.coeffs.keys().map(|n| n.unsigned_abs() as usize).max().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex)> + '_ {
        self.coeffs.iter().map(|(&n, &c)| (n, c))
    }

    /// Density `Σ c_n ζ^n` at a point of Γ.
    pub fn density(&self, zeta: Complex) -> Complex {
        self.iter().map(|(n, c)| c * crate::numeric::powi(zeta, n)).sum()
    }

    pub fn check_annihilation(&self) -> Result<()> {
        let c0 = self.coeff(0);
        if (c0 - Complex::new(1.0, 0.0)).norm() > ANNIHILATION_TOL {
            return Err(Error::AnnihilationViolated(format!("c_0 = {c0}, expected 1")));
        }
        if let Some((n, c)) = self.iter().find(|&(n, c)| n < 0 && c.norm() > ANNIHILATION_TOL) {
            return Err(Error::AnnihilationViolated(format!("c_{n} = {c}, expected 0")));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: MeasureWire =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("measure file: {e}")))?;
        Self::new(wire.coeffs.into_iter().map(|(n, re, im)| (n, Complex::new(re, im))))
    }

    pub fn to_json(&self) -> String {
        let wire = MeasureWire {
            coeffs: self.iter().map(|(n, c)| (n, c.re, c.im)).collect(),
        };
        serde_json::to_string(&wire).expect("measure serializes")
    }
}

/// Positive-frequency part `ĥ(n) = c_n`, `n ≥ 1`, of an annihilating
/// measure, as an ascending coefficient list with `h[0] = 0`.
pub fn fm_riesz_h(sigma: &CircleMeasure) -> Result<Vec<Complex>> {
    sigma.check_annihilation()?;
    let top = sigma.iter().map(|(n, _)| n).max().unwrap_or(0).max(0) as usize;
    let mut h = vec![Complex::new(0.0, 0.0); top + 1];
    for (n, c) in sigma.iter().filter(|&(n, _)| n >= 1) {
        h[n as usize] = c;
    }
    Ok(trim(h))
}

fn trim(mut v: Vec<Complex>) -> Vec<Complex> {
    while v.len() > 1 && v.last().is_some_and(|c| c.norm() == 0.0) {
        v.pop();
    }
    v
}

#[derive(Debug, Clone, PartialEq)]
pub struct KDecomposition {
    pub alpha: Complex,
    /// Ascending coefficients with `k[0] = 0`.
    pub k: Vec<Complex>,
    pub residual_neg_mass: f64,
}

/// Splits `φ·(1 + h)` on Γ into `α + k` plus a negative-frequency residual.
/// `phi_samples` are values at the `N`-th roots of unity.
pub fn compute_k(sigma: &CircleMeasure, phi_samples: &[Complex]) -> Result<KDecomposition> {
    let h = fm_riesz_h(sigma)?;
    let n = phi_samples.len();
    if !is_power_of_two(n) || n < 4 * sigma.max_index() + 4 {
        return Err(Error::UnderResolved(format!(
            "{n} samples for a density of index {}",
            sigma.max_index()
        )));
    }
    let product: Vec<Complex> = phi_samples
        .iter()
        .enumerate()
        .map(|(j, &p)| p * (Complex::new(1.0, 0.0) + horner(&h, unit_root(j, n))))
        .collect();
    let all = fft(&product);
    let mut k = vec![Complex::new(0.0, 0.0)];
    k.extend_from_slice(&all[1..n / 2]);
    Ok(KDecomposition {
        alpha: all[0],
        k,
        residual_neg_mass: all[n / 2..].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HardyDecomposition {
    pub h: Vec<Complex>,
    pub k: Vec<Complex>,
    pub alpha: Complex,
    pub poles: Vec<Complex>,
    /// Monic `Q(ζ) = Π(ζ − z_j)`, ascending.
    pub q: Vec<Complex>,
    pub residual_neg_mass: f64,
}

/// `(α + k(ζ)) / (1 + h(ζ))`.
pub fn reconstruct_phi(h: &[Complex], k: &[Complex], alpha: Complex, zeta: Complex) -> Result<Complex> {
    let den = Complex::new(1.0, 0.0) + horner(h, zeta);
    if den.norm() < NEAR_POLE_TOL {
        return Err(Error::NearPole(zeta));
    }
    Ok((alpha + horner(k, zeta)) / den)
}

impl HardyDecomposition {
    pub fn reconstruct(&self, zeta: Complex) -> Result<Complex> {
        reconstruct_phi(&self.h, &self.k, self.alpha, zeta)
    }

    pub fn q_at(&self, zeta: Complex) -> Complex {
        horner(&self.q, zeta)
    }
}

fn derivative(p: &[Complex]) -> Vec<Complex> {
    p.iter().enumerate().skip(1).map(|(i, &c)| c * i as f64).collect()
}

/// All roots of an ascending polynomial: companion-matrix eigenvalues,
/// each polished by Newton's method.
pub fn polynomial_roots(p: &[Complex]) -> Result<Vec<Complex>> {
    let p = trim(p.to_vec());
    let deg = p.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = p[deg];
    let mut companion = DMatrix::<Complex>::zeros(deg, deg);
    for i in 1..deg {
        companion[(i, i - 1)] = Complex::new(1.0, 0.0);
    }
    for i in 0..deg {
        companion[(i, deg - 1)] = -p[i] / lead;
    }
    let schur = Schur::try_new(companion, 5.0 * f64::EPSILON, 0)
        .ok_or_else(|| Error::LinearAlgebra("companion Schur form did not converge".into()))?;
    let guesses = schur
        .eigenvalues()
        .ok_or_else(|| Error::LinearAlgebra("companion eigenvalues unavailable".into()))?;
    let dp = derivative(&p);
    guesses.iter().map(|&z| polish_root(&p, &dp, z)).collect()
}

fn polish_root(p: &[Complex], dp: &[Complex], mut z: Complex) -> Result<Complex> {
    let scale = |z: Complex| p.iter().rev().fold(0.0, |acc, c| acc * z.norm() + c.norm());
    for _ in 0..100 {
        let v = horner(p, z);
        if v.norm() <= ROOT_RESIDUAL_TOL * scale(z) {
            return Ok(z);
        }
        let d = horner(dp, z);
        if d.norm() == 0.0 {
            break;
        }
        let step = v / d;
        z -= step;
        if step.norm() <= f64::EPSILON * z.norm() {
            break;
        }
    }
    let v = horner(p, z);
    if v.norm() <= ROOT_RESIDUAL_TOL * scale(z) {
        Ok(z)
    } else {
        Err(Error::LinearAlgebra(format!(
            "root near {z} polished only to residual {:.3e}",
            v.norm() / scale(z)
        )))
    }
}

/// Ascending coefficients of `Π(ζ − z_j)`.
pub fn monic_from_roots(roots: &[Complex]) -> Vec<Complex> {
    let mut q = vec![Complex::new(1.0, 0.0)];
    for &z in roots {
        let mut next = vec![Complex::new(0.0, 0.0); q.len() + 1];
        for (i, &c) in q.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= c * z;
        }
        q = next;
    }
    q
}

/// Zeros of `1 + h` inside the disk and the monic `Q` built from them.
/// Zeros within [`BOUNDARY_BAND`] of Γ are an error.
pub fn locate_poles_and_q(h: &[Complex]) -> Result<(Vec<Complex>, Vec<Complex>)> {
    let mut one_plus_h = h.to_vec();
    if one_plus_h.is_empty() {
        one_plus_h.push(Complex::new(0.0, 0.0));
    }
    one_plus_h[0] += Complex::new(1.0, 0.0);
    let mut poles = Vec::new();
    for z in polynomial_roots(&one_plus_h)? {
        let r = z.norm();
        if (r - 1.0).abs() < BOUNDARY_BAND {
            return Err(Error::RootOnBoundary(z));
        }
        if r < 1.0 {
            poles.push(z);
        }
    }
    poles.sort_by(|a, b| (a.norm(), a.arg()).partial_cmp(&(b.norm(), b.arg())).unwrap());
    let q = monic_from_roots(&poles);
    Ok((poles, q))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalyticityVerdict {
    /// No poles, and `φ` has no negative frequencies.
    Analytic,
    /// `Q·φ` is analytic for the located `Q ≠ 1`.
    AnalyticAfterQ,
    /// `φ·(1 + h)` has negative frequencies: this `(φ, σ)` pair does not
    /// satisfy the annihilation hypothesis.
    HypothesisFailed,
    NotVerified,
}

impl AnalyticityVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            AnalyticityVerdict::Analytic => "analytic",
            AnalyticityVerdict::AnalyticAfterQ => "analytic_after_q",
            AnalyticityVerdict::HypothesisFailed => "hypothesis_failed",
            AnalyticityVerdict::NotVerified => "not_verified",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticityReport {
    /// `max_j |Q·reconstruction − Q·φ|` on Γ.
    pub boundary_mismatch: f64,
    /// Negative-frequency mass of `Q·reconstruction` on Γ.
    pub q_reconstruction_neg_mass: f64,
    /// Negative-frequency mass of `φ` itself.
    pub phi_neg_mass: f64,
    /// Samples of `Q·reconstruction` on Γ.
    pub q_reconstruction: Vec<Complex>,
    pub verdict: AnalyticityVerdict,
}

pub fn verify_analyticity(dec: &HardyDecomposition, phi_samples: &[Complex], tol: f64) -> Result<AnalyticityReport> {
    let n = phi_samples.len();
    let mut q_recon = Vec::with_capacity(n);
    let mut mismatch = 0.0f64;
    for (j, &phi) in phi_samples.iter().enumerate() {
        let z = unit_root(j, n);
        let q = dec.q_at(z);
        let r = q * dec.reconstruct(z)?;
        mismatch = mismatch.max((r - q * phi).norm());
        q_recon.push(r);
    }
    let q_neg = negative_frequency_mass(&q_recon)?;
    let phi_neg = negative_frequency_mass(phi_samples)?;
    let verdict = if dec.residual_neg_mass > tol {
        AnalyticityVerdict::HypothesisFailed
    } else if mismatch > tol || q_neg > tol {
        AnalyticityVerdict::NotVerified
    } else if !dec.poles.is_empty() {
        AnalyticityVerdict::AnalyticAfterQ
    } else if phi_neg <= tol {
        AnalyticityVerdict::Analytic
    } else {
        AnalyticityVerdict::NotVerified
    };
    Ok(AnalyticityReport {
        boundary_mismatch: mismatch,
        q_reconstruction_neg_mass: q_neg,
        phi_neg_mass: phi_neg,
        q_reconstruction: q_recon,
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HardyReport {
    pub decomposition: HardyDecomposition,
    pub analyticity: AnalyticityReport,
}

#[derive(Serialize)]
struct Residuals {
    neg_mass: f64,
    q_reconstruction_neg_mass: f64,
    boundary_mismatch: f64,
    phi_neg_mass: f64,
}

#[derive(Serialize)]
struct ReportWire {
    alpha: [f64; 2],
    h: Vec<(usize, f64, f64)>,
    k: Vec<(usize, f64, f64)>,
    poles: Vec<[f64; 2]>,
    #[serde(rename = "Q")]
    q: Vec<[f64; 2]>,
    residuals: Residuals,
    verdict: AnalyticityVerdict,
}

/// Nonzero entries `[n, re, im]`, `n ≥ 1`, of an ascending list.
fn sparse(v: &[Complex], floor: f64) -> Vec<(usize, f64, f64)> {
    v.iter()
        .enumerate()
        .skip(1)
        .filter(|(_, c)| c.norm() > floor)
        .map(|(n, c)| (n, c.re, c.im))
        .collect()
}

impl HardyReport {
    /// JSON form; `k` entries at or below `coeff_floor` in modulus are omitted.
    pub fn to_json(&self, coeff_floor: f64) -> serde_json::Value {
        let d = &self.decomposition;
        let a = &self.analyticity;
        serde_json::to_value(ReportWire {
            alpha: [d.alpha.re, d.alpha.im],
            h: sparse(&d.h, 0.0),
            k: sparse(&d.k, coeff_floor),
            poles: d.poles.iter().map(|z| [z.re, z.im]).collect(),
            q: d.q.iter().map(|z| [z.re, z.im]).collect(),
            residuals: Residuals {
                neg_mass: d.residual_neg_mass,
                q_reconstruction_neg_mass: a.q_reconstruction_neg_mass,
                boundary_mismatch: a.boundary_mismatch,
                phi_neg_mass: a.phi_neg_mass,
            },
            verdict: a.verdict,
        })
        .expect("report serializes")
    }
}

/// Runs the decomposition and the analyticity check on `φ` sampled at
/// `phi_samples` (roots of unity).
pub fn run_pipeline(sigma: &CircleMeasure, phi_samples: &[Complex], tol: f64) -> Result<HardyReport> {
    let h = fm_riesz_h(sigma)?;
    let kd = compute_k(sigma, phi_samples)?;
    let (poles, q) = if h.iter().all(|c| c.norm() == 0.0) {
        (Vec::new(), vec![Complex::new(1.0, 0.0)])
    } else {
        locate_poles_and_q(&h)?
    };
    let decomposition = HardyDecomposition {
        h,
        k: kd.k,
        alpha: kd.alpha,
        poles,
        q,
        residual_neg_mass: kd.residual_neg_mass,
    };
    let analyticity = verify_analyticity(&decomposition, phi_samples, tol)?;
    Ok(HardyReport {
        decomposition,
        analyticity,
    })
}

/// [`run_pipeline`] with `φ` sampled from a descriptor at `n` points.
pub fn run_pipeline_for(sigma: &CircleMeasure, desc: &PhiDescriptor, n: usize, tol: f64) -> Result<HardyReport> {
    let samples = sample_on_circle(n, |z| {
        desc.eval(z).map_err(|e| match e {
            Error::SingularPoint(p) => Error::PoleOnContour(p),
            other => other,
        })
    })?;
    run_pipeline(sigma, &samples, tol)
}
