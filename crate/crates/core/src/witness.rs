//! Exclusion witnesses for non-holomorphic `φ(ζ) = Φ(ζ, ζ̄)`.
//!
//! For each degree `d` the polynomial
//!
//! ```text
//! P_d(ζ, w) = ζ^d w − Σ_{n+m≤d} a_nm ζ^{n+d−m}
//! ```
//!
//! equals `ζ^d ε_d(ζ)` on `γ`, so it is as small as the series tail there,
//! while at an interior graph point `(α₀, φ(α₀))` it stays of size
//! `|α₀|^d |τ|` with `τ = Φ(α₀, ᾱ₀) − Φ(α₀, 1/α₀)`. The normalized growth
//! exponent `g_d = (log|P_d(α₀, φ(α₀))| − log sup_γ|P_d|) / 2d` is bounded
//! for hull points, and the certificate checks that it keeps rising.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::numeric::ln_abs;
use crate::polynomial::BivariatePolynomial;
use crate::series::{BiPowerSeries, PhiKind, SampledCurve};
use crate::{Complex, Error, Result};

/// Sup values below this are reported as the `-∞` sentinel.
pub const DEGENERATE_FLOOR: f64 = 1e-300;
/// Below this `|τ|` the witness family is powerless.
pub const TAU_FLOOR: f64 = 1e-8;
/// Interior values below this are not trusted for a degenerate exclusion.
pub const POINT_FLOOR: f64 = 1e-8;
pub const SUP_CONVERGENCE_TOL: f64 = 1e-6;
/// Oversampling stops after this many doublings.
pub const MAX_DOUBLINGS: u32 = 6;
pub const DEFAULT_ESCAPE_MARGIN: f64 = 0.3;

pub fn build_pd(s: &BiPowerSeries, d: u32) -> Result<BivariatePolynomial> {
    if d == 0 {
        return Err(Error::InvalidInput("witness degree must be ≥ 1".into()));
    }
    s.require_support(d)?;
    let mut p = BivariatePolynomial::monomial(d, 1, Complex::new(1.0, 0.0));
    for (n, m, a) in s.terms() {
        if n + m <= d {
            p.add_term(n + d - m, 0, -a);
        }
    }
    Ok(p)
}

/// `Φ(α, ᾱ) − Φ(α, 1/α)`.
pub fn tau(s: &BiPowerSeries, alpha: Complex) -> Result<Complex> {
    if alpha.norm() == 0.0 || !alpha.is_finite() {
        return Err(Error::SingularPoint(alpha));
    }
    Ok(s.eval_at(alpha, alpha.conj()) - s.eval_at(alpha, alpha.inv()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupMeasurement {
    /// `log max_j |P(ζ_j, w_j)|`, `-∞` when every sample is below the floor.
    pub log_sup: f64,
    pub converged: bool,
    pub below_floor: bool,
    /// Sample count of the finest grid used.
    pub samples: usize,
}

fn log_max(values: &[Complex]) -> f64 {
    let max = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if max < DEGENERATE_FLOOR {
        f64::NEG_INFINITY
    } else {
        max.ln()
    }
}

/// Measured `sup_γ |P|`, refined by doubling the grid until the log changes
/// by less than [`SUP_CONVERGENCE_TOL`].
pub fn sup_on_curve(p: &BivariatePolynomial, curve: &SampledCurve) -> Result<SupMeasurement> {
    let needed = 8 * p.total_degree() as usize + 16;
    if curve.len() < needed {
        return Err(Error::UnderResolved(format!(
            "curve has {} samples, degree {} needs {needed}",
            curve.len(),
            p.total_degree()
        )));
    }
    let mut log_sup = log_max(&curve.eval_poly(p));
    let mut samples = curve.len();
    let mut converged = false;
    for _ in 0..MAX_DOUBLINGS {
        let finer = curve.resample(samples * 2)?;
        let next = log_max(&finer.eval_poly(p));
        samples *= 2;
        let settled = if next == f64::NEG_INFINITY || log_sup == f64::NEG_INFINITY {
            next == log_sup
        } else {
            (next - log_sup).abs() < SUP_CONVERGENCE_TOL
        };
        log_sup = log_sup.max(next);
        if settled {
            converged = true;
            break;
        }
    }
    Ok(SupMeasurement {
        log_sup,
        converged,
        below_floor: log_sup == f64::NEG_INFINITY,
        samples,
    })
}

/// Scans the annulus `½ < |α| < 1` on a 32 × 8 polar grid and returns the
/// node with the largest `|τ|`, together with that `τ`.
pub fn select_alpha0(s: &BiPowerSeries) -> Result<(Complex, Complex)> {
    const ANGLES: usize = 32;
    const RADII: usize = 8;
    let mut best: Option<(Complex, Complex)> = None;
    for i in 0..RADII {
        let r = 0.5 + 0.5 * (i as f64 + 0.5) / RADII as f64;
        for j in 0..ANGLES {
            let alpha = crate::numeric::unit_root(j, ANGLES) * r;
            let t = tau(s, alpha)?;
            if best.map_or(true, |(_, b)| t.norm() > b.norm()) {
                best = Some((alpha, t));
            }
        }
    }
    Ok(best.unwrap())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessVerdict {
    Excluded,
    DegenerateSupZero,
    Inconclusive,
}

impl WitnessVerdict {
    /// Both `Excluded` and `DegenerateSupZero` certify `x ∉ γ̂`.
    pub fn excludes(self) -> bool {
        !matches!(self, WitnessVerdict::Inconclusive)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            WitnessVerdict::Excluded => "excluded",
            WitnessVerdict::DegenerateSupZero => "degenerate_sup_zero",
            WitnessVerdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessRow {
    pub d: u32,
    pub log_sup: f64,
    pub log_at_point: f64,
    /// `(log_at_point − log_sup) / 2d`; `+∞` when the sup is the sentinel.
    pub g: f64,
    pub sup_converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessReport {
    pub alpha0: Complex,
    pub tau: Complex,
    pub rows: Vec<WitnessRow>,
    pub verdict: WitnessVerdict,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RowWire {
    d: u32,
    log_sup: Option<f64>,
    log_at_point: Option<f64>,
    g: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ReportWire {
    alpha0: [f64; 2],
    tau: [f64; 2],
    rows: Vec<RowWire>,
    verdict: WitnessVerdict,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl WitnessReport {
    pub fn degrees(&self) -> Vec<u32> {
        self.rows.iter().map(|r| r.d).collect()
    }

    /// JSON wire form; non-finite reals are emitted as `null`.
    pub fn to_json(&self) -> serde_json::Value {
        let wire = ReportWire {
            alpha0: [self.alpha0.re, self.alpha0.im],
            tau: [self.tau.re, self.tau.im],
            rows: self
                .rows
                .iter()
                .map(|r| RowWire {
                    d: r.d,
                    log_sup: finite(r.log_sup),
                    log_at_point: finite(r.log_at_point),
                    g: finite(r.g),
                })
                .collect(),
            verdict: self.verdict,
        };
        serde_json::to_value(wire).expect("report serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExclusionOptions {
    /// Required rise of `g_d` across the degree list.
    pub escape_margin: f64,
}

impl Default for ExclusionOptions {
    fn default() -> Self {
        Self {
            escape_margin: DEFAULT_ESCAPE_MARGIN,
        }
    }
}

/// Runs the witness family at `α₀` over `degrees` and decides exclusion.
pub fn exclusion_certificate(
    s: &BiPowerSeries,
    alpha0: Complex,
    degrees: &[u32],
    curve: &SampledCurve,
    opts: &ExclusionOptions,
) -> Result<WitnessReport> {
    let r = alpha0.norm();
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidInput(format!("|α₀| = {r} must lie in (0, 1)")));
    }
    if degrees.is_empty() || degrees.windows(2).any(|w| w[0] >= w[1]) || degrees[0] == 0 {
        return Err(Error::InvalidInput(
            "degrees must be a nonempty strictly increasing list of positive integers".into(),
        ));
    }
    match curve.descriptor().kind() {
        PhiKind::BiSeries(c) if c == s => {}
        _ => {
            return Err(Error::InvalidInput(
                "curve must be sampled from the same series".into(),
            ))
        }
    }
    let t = tau(s, alpha0)?;
    if t.norm() < TAU_FLOOR {
        return Err(Error::TauVanishes(t.norm()));
    }
    let phi_at = s.eval(alpha0);

    let rows = degrees
        .par_iter()
        .map(|&d| -> Result<(WitnessRow, f64)> {
            let p = build_pd(s, d)?;
            let sup = sup_on_curve(&p, curve)?;
            let at = p.eval(alpha0, phi_at);
            let log_at_point = ln_abs(at);
            let g = (log_at_point - sup.log_sup) / (2.0 * d as f64);
            Ok((
                WitnessRow {
                    d,
                    log_sup: sup.log_sup,
                    log_at_point,
                    g,
                    sup_converged: sup.converged,
                },
                at.norm(),
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    let degenerate = rows
        .iter()
        .any(|(row, at)| row.log_sup == f64::NEG_INFINITY && *at >= POINT_FLOOR);
    let rows: Vec<WitnessRow> = rows.into_iter().map(|(row, _)| row).collect();
    let verdict = if degenerate {
        WitnessVerdict::DegenerateSupZero
    } else if escapes(&rows, opts.escape_margin) {
        WitnessVerdict::Excluded
    } else {
        WitnessVerdict::Inconclusive
    };
    Ok(WitnessReport {
        alpha0,
        tau: t,
        rows,
        verdict,
    })
}

fn escapes(rows: &[WitnessRow], margin: f64) -> bool {
    if rows.len() < 2 || rows.iter().any(|r| !r.g.is_finite()) {
        return false;
    }
    let increasing = rows.windows(2).all(|w| w[1].g > w[0].g);
    increasing && rows.last().unwrap().g - rows[0].g > margin
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{sample_curve, PhiDescriptor};

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn build_pd_examples() {
        let p = build_pd(&BiPowerSeries::conj(), 1).unwrap();
        assert_eq!(p, BivariatePolynomial::from_terms([(1, 1, c(1.0, 0.0)), (0, 0, c(-1.0, 0.0))]));
        let p = build_pd(&BiPowerSeries::identity(), 1).unwrap();
        assert_eq!(p, BivariatePolynomial::from_terms([(1, 1, c(1.0, 0.0)), (2, 0, c(-1.0, 0.0))]));
        let p = build_pd(&BiPowerSeries::exp_conj(), 2).unwrap();
        let want = BivariatePolynomial::from_terms([
            (2, 1, c(1.0, 0.0)),
            (2, 0, c(-1.0, 0.0)),
            (1, 0, c(-1.0, 0.0)),
            (0, 0, c(-0.5, 0.0)),
        ]);
        assert_eq!(p, want);
        assert!(p.in_degree(4));
        assert!(build_pd(&BiPowerSeries::conj(), 0).is_err());
    }

    #[test]
    fn tau_examples() {
        assert!((tau(&BiPowerSeries::conj(), c(0.5, 0.0)).unwrap() - c(-1.5, 0.0)).norm() < 1e-15);
        assert_eq!(tau(&BiPowerSeries::identity(), c(0.3, 0.4)).unwrap(), c(0.0, 0.0));
        // Oracle: e^{0.5} − e^{2} from the standard library exponential.
        let want = 0.5f64.exp() - 2.0f64.exp();
        assert!((want - -5.740334828230522).abs() < 1e-12);
        let got = tau(&BiPowerSeries::exp_conj(), c(0.5, 0.0)).unwrap();
        assert!((got - c(want, 0.0)).norm() < 1e-13);
        assert!(matches!(tau(&BiPowerSeries::conj(), c(0.0, 0.0)), Err(Error::SingularPoint(_))));
    }

    #[test]
    fn sup_examples() {
        let conj = sample_curve(&PhiDescriptor::builtin("conj").unwrap(), 64).unwrap();
        let p = build_pd(&BiPowerSeries::conj(), 1).unwrap();
        let sup = sup_on_curve(&p, &conj).unwrap();
        assert!(sup.below_floor && sup.converged);
        assert_eq!(sup.log_sup, f64::NEG_INFINITY);

        let pole = sample_curve(&PhiDescriptor::builtin("pole1").unwrap(), 64).unwrap();
        let w = BivariatePolynomial::monomial(0, 1, c(1.0, 0.0));
        let sup = sup_on_curve(&w, &pole).unwrap();
        assert!(sup.log_sup.abs() < 1e-15 && sup.converged);
    }

    #[test]
    fn sup_needs_resolution() {
        let pole = sample_curve(&PhiDescriptor::builtin("pole1").unwrap(), 32).unwrap();
        let p = BivariatePolynomial::monomial(1, 1, c(1.0, 0.0));
        assert!(sup_on_curve(&p, &pole).is_ok());
        let p = BivariatePolynomial::monomial(1, 2, c(1.0, 0.0));
        assert!(matches!(sup_on_curve(&p, &pole), Err(Error::UnderResolved(_))));
    }

    #[test]
    fn conj_point_is_degenerate_exclusion() {
        let s = BiPowerSeries::conj();
        let curve = sample_curve(&PhiDescriptor::bi_series(s.clone()), 64).unwrap();
        let report =
            exclusion_certificate(&s, c(0.5, 0.0), &[1], &curve, &ExclusionOptions::default()).unwrap();
        assert_eq!(report.verdict, WitnessVerdict::DegenerateSupZero);
        assert!(report.verdict.excludes());
        assert!((report.rows[0].log_at_point - 0.75f64.ln()).abs() < 1e-12);
        assert_eq!(report.rows[0].g, f64::INFINITY);
        let json = report.to_json();
        assert_eq!(json["verdict"], "degenerate_sup_zero");
        assert!(json["rows"][0]["log_sup"].is_null());
    }

    #[test]
    fn holomorphic_series_has_no_witness() {
        let s = BiPowerSeries::identity();
        let curve = sample_curve(&PhiDescriptor::bi_series(s.clone()), 64).unwrap();
        let err = exclusion_certificate(&s, c(0.5, 0.0), &[1, 2], &curve, &ExclusionOptions::default());
        assert!(matches!(err, Err(Error::TauVanishes(_))));
    }

    #[test]
    fn mismatched_curve_rejected() {
        let s = BiPowerSeries::conj();
        let curve = sample_curve(&PhiDescriptor::builtin("pole1").unwrap(), 64).unwrap();
        assert!(exclusion_certificate(&s, c(0.5, 0.0), &[1], &curve, &ExclusionOptions::default()).is_err());
    }

    #[test]
    fn alpha0_scan_prefers_small_radius_for_exp() {
        let (alpha, t) = select_alpha0(&BiPowerSeries::exp_conj()).unwrap();
        assert!((alpha - c(0.53125, 0.0)).norm() < 1e-15);
        assert!((t.norm() - 4.867885727209885).abs() < 1e-12);
    }
}
