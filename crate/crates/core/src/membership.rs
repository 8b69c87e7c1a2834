//! Cauchy-integral membership certificates for meromorphic `φ`.
//!
//! If `φ` is meromorphic on the disk with its only pole at 0, of order `k`,
//! then `ζ^{dk} P(ζ, φ(ζ))` is holomorphic for `P ∈ 𝒫_d` and Cauchy's formula
//! gives `|P(ζ₀, φ(ζ₀))| ≤ (1 − |ζ₀|)^{-1} |ζ₀|^{-dk} sup_γ|P|`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::numeric::{horner, ln_abs, powi, unit_root};
use crate::polynomial::{monomials_up_to, BivariatePolynomial};
use crate::series::{sample_curve, PhiDescriptor, PhiKind, SampledCurve};
use crate::witness::sup_on_curve;
use crate::{Complex, Error, Result};

pub const MIN_QUADRATURE_NODES: usize = 512;
pub const BOUNDARY_GAP: f64 = 1e-3;
pub const BOUND_SLACK: f64 = 1e-9;
const WINDING_SAMPLES: usize = 4096;

fn check_point(zeta0: Complex) -> Result<()> {
    let r = zeta0.norm();
    if !r.is_finite() || r == 0.0 || r >= 1.0 {
        return Err(Error::InvalidInput(format!("|ζ₀| = {r} must lie in (0, 1)")));
    }
    if 1.0 - r < BOUNDARY_GAP {
        return Err(Error::TooCloseToBoundary(1.0 - r));
    }
    Ok(())
}

/// Whether `φ` is holomorphic on the closed disk apart from a pole at 0.
///
/// Rational descriptors are checked by the winding number of the
/// denominator (with its zeros at the origin removed) around Γ.
pub fn pole_only_at_origin(desc: &PhiDescriptor) -> bool {
    match desc.kind() {
        PhiKind::BiSeries(s) => s.is_w_free(),
        PhiKind::Laurent(_) => true,
        PhiKind::Rational { denominator, .. } => {
            let skip = denominator.iter().take_while(|c| c.norm() == 0.0).count();
            let reduced = &denominator[skip..];
            let mut turns = 0.0;
            let mut prev = horner(reduced, Complex::new(1.0, 0.0)).arg();
            for j in 1..=WINDING_SAMPLES {
                let a = horner(reduced, unit_root(j % WINDING_SAMPLES, WINDING_SAMPLES)).arg();
                let mut step = a - prev;
                if step > std::f64::consts::PI {
                    step -= std::f64::consts::TAU;
                } else if step < -std::f64::consts::PI {
                    step += std::f64::consts::TAU;
                }
                turns += step;
                prev = a;
            }
            (turns / std::f64::consts::TAU).round() == 0.0
        }
    }
}

/// Trapezoidal approximation of `(1/2πi) ∮ ζ^{dk} P(ζ, φ(ζ)) / (ζ − ζ₀) dζ`,
/// with `d` the total degree of `P` and `k` the descriptor's pole order.
pub fn cauchy_eval(
    p: &BivariatePolynomial,
    desc: &PhiDescriptor,
    zeta0: Complex,
    n: usize,
) -> Result<Complex> {
    check_point(zeta0)?;
    let dk = p.total_degree() as i64 * desc.pole_order_at_zero() as i64;
    let needed = MIN_QUADRATURE_NODES.max(16 * dk as usize);
    if n < needed {
        return Err(Error::UnderResolved(format!(
            "{n} quadrature nodes, need at least {needed}"
        )));
    }
    let mut acc = Complex::new(0.0, 0.0);
    for j in 0..n {
        let z = unit_root(j, n);
        let w = desc.eval(z).map_err(|e| match e {
            Error::SingularPoint(q) => Error::PoleOnContour(q),
            other => other,
        })?;
        acc += powi(z, dk + 1) * p.eval(z, w) / (z - zeta0);
    }
    Ok(acc / n as f64)
}

/// `ζ₀^{dk} P(ζ₀, φ(ζ₀))` evaluated directly.
pub fn direct_eval(p: &BivariatePolynomial, desc: &PhiDescriptor, zeta0: Complex) -> Result<Complex> {
    let dk = p.total_degree() as i64 * desc.pole_order_at_zero() as i64;
    Ok(powi(zeta0, dk) * p.eval(zeta0, desc.eval(zeta0)?))
}

/// `−log(1 − |ζ₀|) + d·k·log(1/|ζ₀|)`.
pub fn membership_bound(zeta0: Complex, k: u32, d: u32) -> f64 {
    let r = zeta0.norm();
    -(1.0 - r).ln() - (d as f64) * (k as f64) * r.ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MembershipRow {
    pub d: u32,
    /// Largest `log |P(x)| − log sup_γ|P|` over the trials.
    pub max_log_ratio: f64,
    pub log_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipReport {
    pub zeta0: Complex,
    pub k: u32,
    pub rows: Vec<MembershipRow>,
    pub violations: usize,
    /// `exp(max_{d≥1} max_log_ratio / d)`; 1 when only `d = 0` was run.
    pub c_estimate: f64,
}

#[derive(Serialize)]
struct ReportWire<'a> {
    zeta0: [f64; 2],
    k: u32,
    rows: &'a [MembershipRow],
    violations: usize,
    #[serde(rename = "C_estimate")]
    c_estimate: f64,
}

impl MembershipReport {
    pub fn max_slack(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.log_bound - r.max_log_ratio)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ReportWire {
            zeta0: [self.zeta0.re, self.zeta0.im],
            k: self.k,
            rows: &self.rows,
            violations: self.violations,
            c_estimate: self.c_estimate,
        })
        .expect("report serializes")
    }
}

/// Random element of `𝒫_d` with coefficients uniform on the unit disk.
/// The stream is keyed by `(seed, d, trial)` so any trial can be replayed.
pub fn random_polynomial(seed: u64, d: u32, trial: u32) -> BivariatePolynomial {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((d as u64) << 32) | trial as u64);
    let mut p = BivariatePolynomial::zero();
    for (n, m) in monomials_up_to(d) {
        let r = rng.gen::<f64>().sqrt();
        let theta = std::f64::consts::TAU * rng.gen::<f64>();
        p.add_term(n, m, Complex::from_polar(r, theta));
    }
    p
}

struct Trial {
    log_ratio: f64,
    poly: BivariatePolynomial,
}

fn run_trial(curve: &SampledCurve, x: (Complex, Complex), seed: u64, d: u32, trial: u32) -> Result<Trial> {
    let poly = random_polynomial(seed, d, trial);
    let sup = sup_on_curve(&poly, curve)?;
    let log_ratio = ln_abs(poly.eval(x.0, x.1)) - sup.log_sup;
    Ok(Trial { log_ratio, poly })
}

/// Spot-checks the membership bound on `trials` random normalized
/// polynomials per degree `0..=d_max`.
///
/// Any violation is returned as [`Error::BoundViolated`] carrying the first
/// offending polynomial in `(d, trial)` order.
pub fn verify_membership(
    desc: &PhiDescriptor,
    zeta0: Complex,
    d_max: u32,
    trials: u32,
    seed: u64,
) -> Result<MembershipReport> {
    check_point(zeta0)?;
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be ≥ 1".into()));
    }
    if !pole_only_at_origin(desc) {
        return Err(Error::InvalidInput(
            "φ must be meromorphic on the disk with its only pole at 0".into(),
        ));
    }
    let k = desc.pole_order_at_zero();
    let x = (zeta0, desc.eval(zeta0)?);
    let n = (8 * d_max as usize + 16).next_power_of_two().max(64);
    let curve = sample_curve(desc, n)?;

    let mut rows = Vec::with_capacity(d_max as usize + 1);
    let mut first_violation: Option<(u32, f64, f64, BivariatePolynomial)> = None;
    let mut violations = 0;
    let mut best_rate = f64::NEG_INFINITY;
    for d in 0..=d_max {
        let results = (0..trials)
            .into_par_iter()
            .map(|t| run_trial(&curve, x, seed, d, t))
            .collect::<Result<Vec<_>>>()?;
        let log_bound = membership_bound(zeta0, k, d);
        let mut max_log_ratio = f64::NEG_INFINITY;
        for trial in results {
            max_log_ratio = max_log_ratio.max(trial.log_ratio);
            if !(trial.log_ratio <= log_bound + BOUND_SLACK) {
                violations += 1;
                if first_violation.is_none() {
                    first_violation = Some((d, trial.log_ratio, log_bound, trial.poly));
                }
            }
        }
        if d >= 1 {
            best_rate = best_rate.max(max_log_ratio / d as f64);
        }
        rows.push(MembershipRow {
            d,
            max_log_ratio,
            log_bound,
        });
    }
    if let Some((degree, log_ratio, log_bound, polynomial)) = first_violation {
        return Err(Error::BoundViolated {
            degree,
            log_ratio,
            log_bound,
            polynomial,
        });
    }
    Ok(MembershipReport {
        zeta0,
        k,
        rows,
        violations,
        c_estimate: if d_max == 0 { 1.0 } else { best_rate.exp() },
    })
}
