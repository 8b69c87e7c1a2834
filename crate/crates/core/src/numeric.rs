//! Small numerical helpers shared across modules.

use std::f64::consts::TAU;

use crate::Complex;

/// Correctly rounded sum of `f64` values (Shewchuk's partials algorithm).
///
/// Exact cancellation matters here: witness polynomials subtract the same
/// coefficients they add, and the surviving tail can be 30+ orders of
/// magnitude below the cancelled terms.
pub fn exact_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut partials: Vec<f64> = Vec::new();
    for mut x in values {
        let mut kept = 0;
        for i in 0..partials.len() {
            let mut y = partials[i];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        partials.truncate(kept);
        partials.push(x);
    }
    // Round the partials (non-overlapping, increasing magnitude) to a double.
    let mut n = partials.len();
    if n == 0 {
        return 0.0;
    }
    n -= 1;
    let mut hi = partials[n];
    let mut lo = 0.0;
    while n > 0 {
        n -= 1;
        let x = hi;
        let y = partials[n];
        hi = x + y;
        let yr = hi - x;
        lo = y - yr;
        if lo != 0.0 {
            break;
        }
    }
    if n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0)) {
        let y = lo * 2.0;
        let x = hi + y;
        if y == x - hi {
            hi = x;
        }
    }
    hi
}

/// Correctly rounded sum of complex values, componentwise.
pub fn exact_complex_sum(values: &[Complex]) -> Complex {
    Complex::new(
        exact_sum(values.iter().map(|z| z.re)),
        exact_sum(values.iter().map(|z| z.im)),
    )
}

/// Natural log of `|z|`, `-∞` for zero.
pub fn ln_abs(z: Complex) -> f64 {
    z.norm().ln()
}

/// `exp(2πi·j/n)`, exact at the quarter points.
pub fn unit_root(j: usize, n: usize) -> Complex {
    debug_assert!(n > 0);
    let j = j % n;
    // Reduce to the first quadrant when n is divisible by 4 so that
    // 1, i, -1, -i come out exactly.
    let (quadrant, rest) = if n % 4 == 0 {
        let q = n / 4;
        (j / q, j % q)
    } else {
        (0, j)
    };
    let theta = TAU * (rest as f64 / n as f64);
    let base = Complex::new(theta.cos(), theta.sin());
    match quadrant {
        0 => base,
        1 => Complex::new(-base.im, base.re),
        2 => -base,
        _ => Complex::new(base.im, -base.re),
    }
}

/// All `n`-th roots of unity in index order.
pub fn unit_roots(n: usize) -> Vec<Complex> {
    (0..n).map(|j| unit_root(j, n)).collect()
}

/// Horner evaluation of `Σ c_k z^k` (ascending coefficients).
pub fn horner(coeffs: &[Complex], z: Complex) -> Complex {
    coeffs
        .iter()
        .rev()
        .fold(Complex::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// `z^k` for a possibly negative exponent.
pub fn powi(z: Complex, k: i64) -> Complex {
    if k >= 0 {
        z.powu(k as u32)
    } else {
        z.inv().powu((-k) as u32)
    }
}

pub fn is_power_of_two(n: usize) -> bool {
    n != 0 && n & (n - 1) == 0
}
