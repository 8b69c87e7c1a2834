use super::bi_series::BiPowerSeries;
use super::laurent::LaurentPoly;
use crate::error::ensure_finite;
use crate::numeric::{horner, powi, unit_root};
use crate::{Complex, Error, Result};

pub const BUILTIN_NAMES: [&str; 5] = ["conj", "identity", "exp_conj", "pole1", "square"];

const SINGULAR_TOL: f64 = 1e-13;
const CIRCLE_CHECK_SAMPLES: usize = 4096;
const CIRCLE_MIN_MODULUS: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub enum PhiKind {
    BiSeries(BiPowerSeries),
    /// Ascending coefficients of numerator and denominator in ζ.
    Rational {
        numerator: Vec<Complex>,
        denominator: Vec<Complex>,
    },
    Laurent(LaurentPoly),
}

/// How `φ` is given, plus its pole order at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiDescriptor {
    kind: PhiKind,
    pole_order_at_zero: u32,
}

impl PhiDescriptor {
    pub fn bi_series(series: BiPowerSeries) -> Self {
        Self {
            kind: PhiKind::BiSeries(series),
            pole_order_at_zero: 0,
        }
    }

    pub fn rational(numerator: Vec<Complex>, denominator: Vec<Complex>) -> Result<Self> {
        for &c in numerator.iter().chain(&denominator) {
            ensure_finite(c, "rational coefficient")?;
        }
        let numerator = trim_trailing(numerator);
        let denominator = trim_trailing(denominator);
        if denominator.is_empty() {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        for j in 0..CIRCLE_CHECK_SAMPLES {
            let z = unit_root(j, CIRCLE_CHECK_SAMPLES);
            if horner(&denominator, z).norm() < CIRCLE_MIN_MODULUS {
                return Err(Error::PoleOnContour(z));
            }
        }
        let low = |v: &[Complex]| v.iter().position(|c| *c != Complex::new(0.0, 0.0));
        let den_low = low(&denominator).unwrap_or(0) as u32;
        let pole_order_at_zero = match low(&numerator) {
            Some(num_low) => den_low.saturating_sub(num_low as u32),
            None => 0,
        };
        Ok(Self {
            kind: PhiKind::Rational {
                numerator,
                denominator,
            },
            pole_order_at_zero,
        })
    }

    pub fn laurent(poly: LaurentPoly) -> Result<Self> {
        for (_, c) in poly.iter() {
            ensure_finite(c, "laurent coefficient")?;
        }
        let pole_order_at_zero = if poly.is_zero() {
            0
        } else {
            (-poly.lowest()).max(0) as u32
        };
        Ok(Self {
            kind: PhiKind::Laurent(poly),
            pole_order_at_zero,
        })
    }

    pub fn builtin(name: &str) -> Result<Self> {
        let one = Complex::new(1.0, 0.0);
        let zero = Complex::new(0.0, 0.0);
        match name {
            "conj" => Ok(Self::bi_series(BiPowerSeries::conj())),
            "identity" => Ok(Self::bi_series(BiPowerSeries::identity())),
            "exp_conj" => Ok(Self::bi_series(BiPowerSeries::exp_conj())),
            "square" => Ok(Self::bi_series(BiPowerSeries::square())),
            "pole1" => Self::rational(vec![one], vec![zero, one]),
            other => Err(Error::InvalidInput(format!(
                "unknown builtin '{other}' (expected one of {BUILTIN_NAMES:?})"
            ))),
        }
    }

    pub fn kind(&self) -> &PhiKind {
        &self.kind
    }

    pub fn pole_order_at_zero(&self) -> u32 {
        self.pole_order_at_zero
    }

    pub fn as_series(&self) -> Option<&BiPowerSeries> {
        match &self.kind {
            PhiKind::BiSeries(s) => Some(s),
            _ => None,
        }
    }

    pub fn eval(&self, zeta: Complex) -> Result<Complex> {
        ensure_finite(zeta, "ζ")?;
        let value = match &self.kind {
            PhiKind::BiSeries(s) => s.eval(zeta),
            PhiKind::Rational {
                numerator,
                denominator,
            } => {
                let den = horner(denominator, zeta);
                if den.norm() < SINGULAR_TOL {
                    return Err(Error::SingularPoint(zeta));
                }
                horner(numerator, zeta) / den
            }
            PhiKind::Laurent(l) => {
                if l.lowest() < 0 && zeta.norm() < SINGULAR_TOL {
                    return Err(Error::SingularPoint(zeta));
                }
                l.iter().map(|(j, c)| c * powi(zeta, j)).sum()
            }
        };
        ensure_finite(value, "φ(ζ)")
    }

    /// `φ` restricted to the unit circle as a finite Laurent polynomial,
    /// when such a form exists.
    pub fn laurent_on_circle(&self) -> Option<LaurentPoly> {
        match &self.kind {
            PhiKind::BiSeries(s) => Some(s.laurent_on_circle()),
            PhiKind::Laurent(l) => Some(l.clone()),
            PhiKind::Rational {
                numerator,
                denominator,
            } => {
                let mut nonzero = denominator
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| **c != Complex::new(0.0, 0.0));
                let (k, &lead) = nonzero.next()?;
                if nonzero.next().is_some() {
                    return None;
                }
                let coeffs = numerator.iter().map(|&c| c / lead).collect();
                Some(LaurentPoly::new(-(k as i64), coeffs))
            }
        }
    }
}

fn trim_trailing(mut v: Vec<Complex>) -> Vec<Complex> {
    while v.last() == Some(&Complex::new(0.0, 0.0)) {
        v.pop();
    }
    v
}
