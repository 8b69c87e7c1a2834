use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::numeric::{exact_complex_sum, powi, unit_root};
use crate::Complex;

/// Finite Laurent polynomial `Σ_{j=lowest}^{lowest+len-1} c_j ζ^j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaurentPoly {
    lowest: i64,
    coeffs: Vec<Complex>,
}

impl LaurentPoly {
    /// Leading and trailing exact zeros are trimmed.
    pub fn new(lowest: i64, coeffs: Vec<Complex>) -> Self {
        let zero = Complex::new(0.0, 0.0);
        let first = coeffs.iter().position(|&c| c != zero);
        match first {
            None => Self::zero(),
            Some(first) => {
                let last = coeffs.iter().rposition(|&c| c != zero).unwrap();
                Self {
                    lowest: lowest + first as i64,
                    coeffs: coeffs[first..=last].to_vec(),
                }
            }
        }
    }

    pub fn zero() -> Self {
        Self {
            lowest: 0,
            coeffs: Vec::new(),
        }
    }

    pub fn one() -> Self {
        Self {
            lowest: 0,
            coeffs: vec![Complex::new(1.0, 0.0)],
        }
    }

    /// Sums every contribution per exponent with correct rounding.
    pub fn from_contributions(contributions: BTreeMap<i64, Vec<Complex>>) -> Self {
        let (Some(&lo), Some(&hi)) = (contributions.keys().next(), contributions.keys().last())
        else {
            return Self::zero();
        };
        let mut coeffs = vec![Complex::new(0.0, 0.0); (hi - lo + 1) as usize];
        for (e, parts) in &contributions {
            coeffs[(e - lo) as usize] = exact_complex_sum(parts);
        }
        Self::new(lo, coeffs)
    }

    pub fn lowest(&self) -> i64 {
        self.lowest
    }

    pub fn highest(&self) -> i64 {
        self.lowest + self.coeffs.len() as i64 - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, j: i64) -> Complex {
        let idx = j - self.lowest;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            Complex::new(0.0, 0.0)
        } else {
            self.coeffs[idx as usize]
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (self.lowest + i as i64, c))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut contributions: BTreeMap<i64, Vec<Complex>> = BTreeMap::new();
        for (i, a) in self.iter() {
            for (j, b) in other.iter() {
                contributions.entry(i + j).or_default().push(a * b);
            }
        }
        Self::from_contributions(contributions)
    }

    pub fn eval(&self, z: Complex) -> Complex {
        self.iter().map(|(j, c)| c * powi(z, j)).sum()
    }

    /// Value at the node `exp(2πi·idx/n)`, using exact node powers.
    pub fn eval_at_node(&self, idx: usize, n: usize) -> Complex {
        let n_i = n as i64;
        self.iter()
            .map(|(e, c)| {
                let k = (e * idx as i64).rem_euclid(n_i) as usize;
                c * unit_root(k, n)
            })
            .sum()
    }

    /// Values at every node `exp(2πi·j/n)`, given the precomputed roots.
    pub fn eval_at_nodes(&self, roots: &[Complex]) -> Vec<Complex> {
        let n = roots.len() as i64;
        (0..n)
            .map(|j| {
                self.iter()
                    .map(|(e, c)| c * roots[(e * j).rem_euclid(n) as usize])
                    .sum()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex {
        Complex::new(re, 0.0)
    }

    #[test]
    fn trims_and_reports_range() {
        let l = LaurentPoly::new(-2, vec![c(0.0), c(1.0), c(2.0), c(0.0)]);
        assert_eq!(l.lowest(), -1);
        assert_eq!(l.highest(), 0);
        assert_eq!(l.coeff(-1), c(1.0));
        assert_eq!(l.coeff(5), c(0.0));
    }

    #[test]
    fn product_of_inverse_pair() {
        // (ζ + ζ^{-1})^2 = ζ^2 + 2 + ζ^{-2}
        let a = LaurentPoly::new(-1, vec![c(1.0), c(0.0), c(1.0)]);
        let sq = a.mul(&a);
        assert_eq!(sq.lowest(), -2);
        assert_eq!(sq.coeff(0), c(2.0));
        assert_eq!(sq.coeff(2), c(1.0));
        assert_eq!(sq.coeff(1), c(0.0));
    }

    #[test]
    fn node_evaluation_matches_direct() {
        let l = LaurentPoly::new(-3, vec![c(0.5), Complex::new(0.0, 2.0), c(-1.0), c(0.25), c(3.0)]);
        for j in 0..16 {
            let z = unit_root(j, 16);
            assert!((l.eval_at_node(j, 16) - l.eval(z)).norm() < 1e-13);
        }
    }
}
