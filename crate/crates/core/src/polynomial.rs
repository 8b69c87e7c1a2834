//! Polynomials `P(ζ, w) = Σ c_nm ζ^n w^m` in two complex variables.

use std::collections::BTreeMap;
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

use crate::Complex;

/// Sparse polynomial in `(ζ, w)`; exact zeros are never stored.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BivariatePolynomial {
    coeffs: BTreeMap<(u32, u32), Complex>,
}

impl BivariatePolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn monomial(n: u32, m: u32, c: Complex) -> Self {
        let mut p = Self::zero();
        p.add_term(n, m, c);
        p
    }

    /// Builds from `(n, m, c)` triples; repeated keys are summed.
    pub fn from_terms<I: IntoIterator<Item = (u32, u32, Complex)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (n, m, c) in terms {
            p.add_term(n, m, c);
        }
        p
    }

    pub fn add_term(&mut self, n: u32, m: u32, c: Complex) {
        let entry = self.coeffs.entry((n, m)).or_insert(Complex::new(0.0, 0.0));
        *entry += c;
        if *entry == Complex::new(0.0, 0.0) {
            self.coeffs.remove(&(n, m));
        }
    }

    pub fn coeff(&self, n: u32, m: u32) -> Complex {
        self.coeffs
            .get(&(n, m))
            .copied()
            .unwrap_or(Complex::new(0.0, 0.0))
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, Complex)> + '_ {
        self.coeffs.iter().map(|(&(n, m), &c)| (n, m, c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `max(n + m)` over stored coefficients (0 for the zero polynomial).
    pub fn total_degree(&self) -> u32 {
        self.coeffs.keys().map(|&(n, m)| n + m).max().unwrap_or(0)
    }

    /// Highest power of `w` present.
    pub fn w_degree(&self) -> u32 {
        self.coeffs.keys().map(|&(_, m)| m).max().unwrap_or(0)
    }

    /// Membership in `𝒫_D`.
    pub fn in_degree(&self, bound: u32) -> bool {
        self.total_degree() <= bound
    }

    pub fn scale(&self, s: Complex) -> Self {
        Self::from_terms(self.terms().map(|(n, m, c)| (n, m, c * s)))
    }

    pub fn eval(&self, zeta: Complex, w: Complex) -> Complex {
        let max_n = self.coeffs.keys().map(|&(n, _)| n).max().unwrap_or(0) as usize;
        let max_m = self.w_degree() as usize;
        let zp = powers(zeta, max_n);
        let wp = powers(w, max_m);
        self.terms()
            .map(|(n, m, c)| c * zp[n as usize] * wp[m as usize])
            .sum()
    }
}

fn powers(z: Complex, up_to: usize) -> Vec<Complex> {
    let mut out = Vec::with_capacity(up_to + 1);
    let mut acc = Complex::new(1.0, 0.0);
    for _ in 0..=up_to {
        out.push(acc);
        acc *= z;
    }
    out
}

impl Add for &BivariatePolynomial {
    type Output = BivariatePolynomial;

    fn add(self, rhs: Self) -> BivariatePolynomial {
        let mut out = self.clone();
        for (n, m, c) in rhs.terms() {
            out.add_term(n, m, c);
        }
        out
    }
}

impl Sub for &BivariatePolynomial {
    type Output = BivariatePolynomial;

    fn sub(self, rhs: Self) -> BivariatePolynomial {
        let mut out = self.clone();
        for (n, m, c) in rhs.terms() {
            out.add_term(n, m, -c);
        }
        out
    }
}

/// Monomial exponents `(n, m)` with `n + m ≤ d`, ordered by total degree
/// and then by descending power of ζ.
pub fn monomials_up_to(d: u32) -> Vec<(u32, u32)> {
    (0..=d)
        .flat_map(|t| (0..=t).rev().map(move |n| (n, t - n)))
        .collect()
}
