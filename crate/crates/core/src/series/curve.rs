use std::collections::BTreeMap;

use super::descriptor::PhiDescriptor;
use super::laurent::LaurentPoly;
use crate::numeric::{is_power_of_two, unit_root};
use crate::polynomial::BivariatePolynomial;
use crate::{Complex, Error, Result};

pub const MIN_SAMPLES: usize = 32;

/// `N` uniform samples of `γ = {(ζ, φ(ζ)) : |ζ| = 1}`.
#[derive(Debug, Clone)]
pub struct SampledCurve {
    zeta: Vec<Complex>,
    w: Vec<Complex>,
    descriptor: PhiDescriptor,
    laurent: Option<LaurentPoly>,
}

pub fn sample_curve(desc: &PhiDescriptor, n: usize) -> Result<SampledCurve> {
    if !is_power_of_two(n) || n < MIN_SAMPLES {
        return Err(Error::InvalidInput(format!(
            "sample count {n} must be a power of two ≥ {MIN_SAMPLES}"
        )));
    }
    let mut zeta = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    for j in 0..n {
        let z = unit_root(j, n);
        let value = desc.eval(z).map_err(|e| match e {
            Error::SingularPoint(p) => Error::PoleOnContour(p),
            other => other,
        })?;
        zeta.push(z);
        w.push(value);
    }
    Ok(SampledCurve {
        zeta,
        w,
        descriptor: desc.clone(),
        laurent: desc.laurent_on_circle(),
    })
}

impl SampledCurve {
    pub fn len(&self) -> usize {
        self.zeta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeta.is_empty()
    }

    pub fn zeta(&self) -> &[Complex] {
        &self.zeta
    }

    pub fn w(&self) -> &[Complex] {
        &self.w
    }

    pub fn descriptor(&self) -> &PhiDescriptor {
        &self.descriptor
    }

    pub fn laurent_form(&self) -> Option<&LaurentPoly> {
        self.laurent.as_ref()
    }

    pub fn resample(&self, n: usize) -> Result<SampledCurve> {
        sample_curve(&self.descriptor, n)
    }

    /// `P(ζ_j, φ(ζ_j))` at every sample.
    ///
    /// When `φ` has a Laurent form on Γ, `P(ζ, φ(ζ))` is first expanded as
    /// a Laurent polynomial with correctly rounded coefficients, so exact
    /// cancellations (as in the witness polynomials) survive evaluation.
    pub fn eval_poly(&self, p: &BivariatePolynomial) -> Vec<Complex> {
        match &self.laurent {
            Some(phi) => {
                compose_on_circle(p, phi).eval_at_nodes(&self.zeta)
            }
            None => self
                .zeta
                .iter()
                .zip(&self.w)
                .map(|(&z, &w)| p.eval(z, w))
                .collect(),
        }
    }
}

/// Laurent expansion of `P(ζ, φ(ζ))` on the unit circle.
pub fn compose_on_circle(p: &BivariatePolynomial, phi: &LaurentPoly) -> LaurentPoly {
    let mut powers = vec![LaurentPoly::one()];
    for _ in 0..p.w_degree() {
        let next = powers.last().unwrap().mul(phi);
        powers.push(next);
    }
    let mut contributions: BTreeMap<i64, Vec<Complex>> = BTreeMap::new();
    for (n, m, c) in p.terms() {
        for (e, a) in powers[m as usize].iter() {
            contributions.entry(n as i64 + e).or_default().push(c * a);
        }
    }
    LaurentPoly::from_contributions(contributions)
}
