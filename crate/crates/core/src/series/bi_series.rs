use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::laurent::LaurentPoly;
use crate::error::ensure_finite;
use crate::{Complex, Error, Result};

/// Coefficient decay certificate `|a_nm| ≤ C_R / R^{n+m}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayCert {
    pub radius: f64,
    pub constant: f64,
    /// Fitted from the stored coefficients rather than supplied.
    pub empirical: bool,
}

/// Tail estimates for `sup_{|ζ|≤2} |ε_d(ζ)|` under one decay certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    pub degree: u32,
    pub cert: DecayCert,
    /// `log(C_R (4/R)^d)`.
    pub log_bound: f64,
    /// `log(C_R (2/R)^d (4 + 2d))`, valid for every `d` once `R > 4`.
    pub log_refined: f64,
    /// `4 + 2d ≤ 2^d`, i.e. the simple bound dominates the refined one.
    pub past_crossover: bool,
}

impl TailBound {
    pub fn bound(&self) -> f64 {
        self.log_bound.exp()
    }

    pub fn refined(&self) -> f64 {
        self.log_refined.exp()
    }
}

/// Smallest `d ≥ 1` with `4 + 2d ≤ 2^d`.
pub fn crossover_degree() -> u32 {
    (1..64).find(|&d| 4 + 2 * d as u64 <= 1u64 << d).unwrap()
}

/// Stored total degree needed before degree-`d` operations on a truncated series.
pub fn required_support(d: u32) -> u32 {
    2 * d + 8
}

/// Finite list of coefficients `a_nm` of an entire function `Φ(z, w)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiPowerSeries {
    terms: BTreeMap<(u32, u32), Complex>,
    certs: Vec<DecayCert>,
    truncation_note: String,
}

impl BiPowerSeries {
    /// Validates keys, finiteness and every certificate against every term.
    pub fn new<I>(terms: I, certs: Vec<DecayCert>, truncation_note: impl Into<String>) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32, Complex)>,
    {
        let mut map = BTreeMap::new();
        for (n, m, a) in terms {
            ensure_finite(a, "series coefficient")?;
            if map.insert((n, m), a).is_some() {
                return Err(Error::InvalidInput(format!("duplicate term ({n}, {m})")));
            }
        }
        map.retain(|_, a| *a != Complex::new(0.0, 0.0));
        let mut series = Self {
            terms: map,
            certs: Vec::new(),
            truncation_note: truncation_note.into(),
        };
        for cert in certs {
            series.push_cert(cert)?;
        }
        Ok(series)
    }

    /// Adds a certificate after checking it against all stored terms.
    pub fn push_cert(&mut self, cert: DecayCert) -> Result<()> {
        if !(cert.radius.is_finite() && cert.radius > 0.0) {
            return Err(Error::InvalidInput(format!("certificate radius {}", cert.radius)));
        }
        if !(cert.constant.is_finite() && cert.constant > 0.0) {
            return Err(Error::InvalidInput(format!("certificate constant {}", cert.constant)));
        }
        let log_c = cert.constant.ln();
        let log_r = cert.radius.ln();
        for (&(n, m), a) in &self.terms {
            let lhs = a.norm().ln();
            let rhs = log_c - (n + m) as f64 * log_r;
            if lhs > rhs + 1e-12 * rhs.abs().max(1.0) {
                return Err(Error::InvalidInput(format!(
                    "certificate (R = {}, C = {}) fails at term ({n}, {m})",
                    cert.radius, cert.constant
                )));
            }
        }
        self.certs.push(cert);
        Ok(())
    }

    /// `C_R := max |a_nm| R^{n+m}` over stored terms, flagged empirical.
    pub fn fit_cert(&self, radius: f64) -> Result<DecayCert> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidInput(format!("certificate radius {radius}")));
        }
        let log_r = radius.ln();
        let log_c = self
            .terms
            .iter()
            .map(|(&(n, m), a)| a.norm().ln() + (n + m) as f64 * log_r)
            .fold(f64::NEG_INFINITY, f64::max);
        let constant = if log_c.is_finite() {
            log_c.exp()
        } else {
            f64::MIN_POSITIVE
        };
        Ok(DecayCert {
            radius,
            constant,
            empirical: true,
        })
    }

    pub fn with_fitted_certs(mut self, radii: &[f64]) -> Result<Self> {
        for &r in radii {
            let cert = self.fit_cert(r)?;
            // The fitted constant is tight; nudge by one ulp-scale factor so
            // the exhaustive check accepts it after the log round trip.
            self.push_cert(DecayCert {
                constant: cert.constant * (1.0 + 1e-14),
                ..cert
            })?;
        }
        Ok(self)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, Complex)> + '_ {
        self.terms.iter().map(|(&(n, m), &a)| (n, m, a))
    }

    pub fn coeff(&self, n: u32, m: u32) -> Complex {
        self.terms
            .get(&(n, m))
            .copied()
            .unwrap_or(Complex::new(0.0, 0.0))
    }

    pub fn certs(&self) -> &[DecayCert] {
        &self.certs
    }

    pub fn truncation_note(&self) -> &str {
        &self.truncation_note
    }

    pub fn is_truncated(&self) -> bool {
        !self.truncation_note.is_empty()
    }

    pub fn max_total_degree(&self) -> u32 {
        self.terms.keys().map(|&(n, m)| n + m).max().unwrap_or(0)
    }

    /// `φ = Φ(ζ, ζ̄)` is holomorphic exactly when no term involves `w`.
    pub fn is_w_free(&self) -> bool {
        self.terms.keys().all(|&(_, m)| m == 0)
    }

    /// Enforces the stored-support margin for truncated series.
    pub fn require_support(&self, d: u32) -> Result<()> {
        let required = required_support(d);
        let available = self.max_total_degree();
        if self.is_truncated() && available < required {
            return Err(Error::InsufficientTerms {
                degree: d,
                required,
                available,
            });
        }
        Ok(())
    }

    /// `Φ(z, w)`.
    pub fn eval_at(&self, z: Complex, w: Complex) -> Complex {
        self.sum_where(z, w, |_| true)
    }

    /// `φ(ζ) = Φ(ζ, ζ̄)`.
    pub fn eval(&self, zeta: Complex) -> Complex {
        self.eval_at(zeta, zeta.conj())
    }

    /// `Σ_{n+m≤d} a_nm ζ^n ζ̄^m`.
    pub fn eval_truncated(&self, d: u32, zeta: Complex) -> Complex {
        self.sum_where(zeta, zeta.conj(), |t| t <= d)
    }

    /// `ε_d(ζ) = Σ_{n+m>d} a_nm ζ^n ζ̄^m`.
    pub fn eps_d(&self, d: u32, zeta: Complex) -> Result<Complex> {
        ensure_finite(zeta, "ζ")?;
        self.require_support(d)?;
        Ok(self.sum_where(zeta, zeta.conj(), |t| t > d))
    }

    /// `max_j |ε_d(ζ_j)|` over `samples` uniform points of `|ζ| = radius`.
    pub fn sup_eps_on_circle(&self, d: u32, radius: f64, samples: usize) -> Result<f64> {
        self.require_support(d)?;
        Ok((0..samples)
            .map(|j| {
                let z = crate::numeric::unit_root(j, samples) * radius;
                self.sum_where(z, z.conj(), |t| t > d).norm()
            })
            .fold(0.0, f64::max))
    }

    pub fn tail_bound(&self, d: u32, cert_index: usize) -> Result<TailBound> {
        let cert = *self.certs.get(cert_index).ok_or_else(|| {
            Error::InvalidInput(format!(
                "certificate index {cert_index} out of range ({} stored)",
                self.certs.len()
            ))
        })?;
        if cert.radius <= 4.0 {
            return Err(Error::InvalidCert(cert.radius));
        }
        if d == 0 {
            return Err(Error::InvalidInput("tail bound needs d ≥ 1".into()));
        }
        let df = d as f64;
        let log_c = cert.constant.ln();
        Ok(TailBound {
            degree: d,
            cert,
            log_bound: log_c + df * (4.0 / cert.radius).ln(),
            log_refined: log_c + df * (2.0 / cert.radius).ln() + (4.0 + 2.0 * df).ln(),
            past_crossover: d >= crossover_degree(),
        })
    }

    /// Restriction to the unit circle, where `ζ̄ = 1/ζ`.
    pub fn laurent_on_circle(&self) -> LaurentPoly {
        let mut contributions: BTreeMap<i64, Vec<Complex>> = BTreeMap::new();
        for (&(n, m), &a) in &self.terms {
            contributions.entry(n as i64 - m as i64).or_default().push(a);
        }
        LaurentPoly::from_contributions(contributions)
    }

    fn sum_where(&self, z: Complex, w: Complex, keep: impl Fn(u32) -> bool) -> Complex {
        let max_n = self.terms.keys().map(|&(n, _)| n).max().unwrap_or(0) as usize;
        let max_m = self.terms.keys().map(|&(_, m)| m).max().unwrap_or(0) as usize;
        let zp = power_table(z, max_n);
        let wp = power_table(w, max_m);
        self.terms
            .iter()
            .filter(|(&(n, m), _)| keep(n + m))
            .map(|(&(n, m), &a)| a * zp[n as usize] * wp[m as usize])
            .sum()
    }

    /// Φ = w.
    pub fn conj() -> Self {
        Self::single(0, 1)
    }

    /// Φ = z.
    pub fn identity() -> Self {
        Self::single(1, 0)
    }

    /// Φ = z².
    pub fn square() -> Self {
        Self::single(2, 0)
    }

    /// Φ = e^w truncated at `m ≤ 80`, with fitted certificates at R = 8 and 16.
    pub fn exp_conj() -> Self {
        Self::exp_conj_truncated(80)
    }

    /// Φ = e^w with terms `a_0m = 1/m!` for `m ≤ max_m`.
    pub fn exp_conj_truncated(max_m: u32) -> Self {
        let mut inv_fact = 1.0;
        let terms = (0..=max_m).map(|m| {
            if m > 0 {
                inv_fact /= m as f64;
            }
            (0, m, Complex::new(inv_fact, 0.0))
        });
        let terms: Vec<_> = terms.collect();
        Self::new(terms, Vec::new(), format!("e^w truncated at m <= {max_m}"))
            .and_then(|s| s.with_fitted_certs(&[8.0, 16.0]))
            .expect("builtin series is valid")
    }

    fn single(n: u32, m: u32) -> Self {
        Self::new([(n, m, Complex::new(1.0, 0.0))], Vec::new(), "")
            .and_then(|s| s.with_fitted_certs(&[8.0]))
            .expect("builtin series is valid")
    }
}

fn power_table(z: Complex, up_to: usize) -> Vec<Complex> {
    let mut out = Vec::with_capacity(up_to + 1);
    let mut acc = Complex::new(1.0, 0.0);
    for _ in 0..=up_to {
        out.push(acc);
        acc *= z;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn eval_examples() {
        assert!((BiPowerSeries::conj().eval(c(0.5, 0.0)) - c(0.5, 0.0)).norm() < 1e-15);
        assert!((BiPowerSeries::identity().eval(c(0.0, 1.0)) - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn exp_conj_at_i_matches_direct_summation() {
        // Oracle: independent summation of (-i)^m / m! for m ≤ 40.
        let mut term = c(1.0, 0.0);
        let mut oracle = c(0.0, 0.0);
        for m in 0..=40 {
            if m > 0 {
                term = term * c(0.0, -1.0) / m as f64;
            }
            oracle += term;
        }
        assert!((oracle - c(0.5403023058681398, -0.8414709848078965)).norm() < 1e-15);
        let s = BiPowerSeries::exp_conj_truncated(40);
        assert!((s.eval(c(0.0, 1.0)) - oracle).norm() < 1e-14);
    }

    #[test]
    fn duplicate_keys_rejected() {
        let err = BiPowerSeries::new([(1, 0, c(1.0, 0.0)), (1, 0, c(2.0, 0.0))], vec![], "");
        assert!(matches!(err, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn bad_certificate_rejected() {
        let cert = DecayCert {
            radius: 8.0,
            constant: 1.0,
            empirical: false,
        };
        // |a_01| = 1 > 1/8
        let err = BiPowerSeries::new([(0, 1, c(1.0, 0.0))], vec![cert], "");
        assert!(err.is_err());
    }

    #[test]
    fn fitted_exp_cert_matches_direct_scan() {
        // Oracle: max_m 8^m / m! over m ≤ 100 by direct scan.
        let mut best = 0.0f64;
        let mut t = 1.0f64;
        for m in 0..=100 {
            if m > 0 {
                t *= 8.0 / m as f64;
            }
            best = best.max(t);
        }
        assert!((best - 416.1015873015873).abs() < 1e-9);
        let s = BiPowerSeries::exp_conj();
        let cert = s.certs()[0];
        assert_eq!(cert.radius, 8.0);
        assert!(cert.empirical);
        assert!((cert.constant - best).abs() < 1e-9);
    }

    #[test]
    fn tail_bound_examples() {
        let s = BiPowerSeries::exp_conj();
        let tb = s.tail_bound(10, 0).unwrap();
        assert!((tb.bound() - 0.40635).abs() < 1e-4);
        assert!(tb.past_crossover);
        let unit = BiPowerSeries::new(
            [(0, 1, c(0.1, 0.0))],
            vec![DecayCert {
                radius: 8.0,
                constant: 1.0,
                empirical: false,
            }],
            "",
        )
        .unwrap();
        for d in 1..20 {
            let ratio = unit.tail_bound(d + 1, 0).unwrap().bound() / unit.tail_bound(d, 0).unwrap().bound();
            assert!((ratio - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn tail_bound_needs_large_radius() {
        let s = BiPowerSeries::new([(0, 1, c(1.0, 0.0))], vec![], "")
            .unwrap()
            .with_fitted_certs(&[3.0])
            .unwrap();
        assert!(matches!(s.tail_bound(5, 0), Err(Error::InvalidCert(_))));
        assert!(s.tail_bound(5, 1).is_err());
    }

    #[test]
    fn crossover_is_four() {
        assert_eq!(crossover_degree(), 4);
    }

    #[test]
    fn eps_examples() {
        assert_eq!(BiPowerSeries::conj().eps_d(1, c(0.3, 0.7)).unwrap(), c(0.0, 0.0));
        let zpw = BiPowerSeries::new([(1, 0, c(1.0, 0.0)), (0, 1, c(1.0, 0.0))], vec![], "").unwrap();
        assert_eq!(zpw.eps_d(2, c(0.3, 0.0)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn exp_tail_at_two_matches_direct_summation() {
        // Oracle: Σ_{m=11}^{60} 2^m / m! accumulated directly.
        let mut t = 1.0f64;
        let mut tail = 0.0;
        for m in 1..=60 {
            t *= 2.0 / m as f64;
            if m > 10 {
                tail += t;
            }
        }
        assert!((tail - 6.138993594123252e-5).abs() < 1e-18);
        let s = BiPowerSeries::exp_conj_truncated(60);
        let eps = s.eps_d(10, c(2.0, 0.0)).unwrap();
        assert!((eps - c(tail, 0.0)).norm() < 1e-18);
    }

    #[test]
    fn margin_rule_applies_to_truncated_series() {
        let s = BiPowerSeries::exp_conj_truncated(60);
        assert!(s.eps_d(26, c(1.0, 0.0)).is_ok());
        assert!(matches!(
            s.eps_d(27, c(1.0, 0.0)),
            Err(Error::InsufficientTerms { required: 62, .. })
        ));
        assert!(BiPowerSeries::exp_conj().eps_d(32, c(1.0, 0.0)).is_ok());
    }
}
