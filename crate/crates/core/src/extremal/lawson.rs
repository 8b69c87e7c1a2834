//! Discrete complex Chebyshev problems with one linear constraint.
//!
//! Given function values on `N` samples and a linear functional `ℓ`, the
//! engine solves `min max_j |P_j|` subject to `ℓ(P) = 1` by Lawson's
//! iteratively reweighted least squares. The reciprocal of the optimum is
//! the extremal constant `max{|ℓ(P)| : max_j |P_j| ≤ 1}`.

use nalgebra::{Cholesky, DMatrix, DVector, SVD};

use crate::{Complex, Error, Result};

/// Relative tolerance for discarding singular directions.
pub const RANK_TOL: f64 = 1e-12;
/// Functionals with a larger relative component outside the row space are
/// unbounded: some element vanishes on every sample but not under `ℓ`.
pub const UNBOUNDED_RESIDUAL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LawsonOptions {
    pub max_iter: usize,
    /// Stop once the discrete sup moves by less than this, relatively.
    pub stagnation_tol: f64,
    /// Stop once `log upper − log lower` drops below this.
    pub gap_tol: f64,
    pub weight_floor: f64,
    pub mixing: f64,
    pub mixing_period: usize,
}

impl Default for LawsonOptions {
    fn default() -> Self {
        Self {
            max_iter: 500,
            stagnation_tol: 1e-8,
            gap_tol: 1e-10,
            weight_floor: 1e-300,
            mixing: 1e-12,
            mixing_period: 50,
        }
    }
}

/// Column-equilibrated, orthonormalized evaluation matrix.
///
/// The columns of `q` are orthonormal for the uniform discrete inner
/// product `(1/N) Σ_j`, and span the same space as the original columns
/// up to the rank tolerance.
#[derive(Debug, Clone)]
pub struct EvaluationBasis {
    q: DMatrix<Complex>,
    /// Leading rows of `Vᴴ`.
    v_t: DMatrix<Complex>,
    sigma: Vec<f64>,
    col_scale: Vec<f64>,
    columns: usize,
}

/// A functional expressed in an [`EvaluationBasis`].
#[derive(Debug, Clone)]
pub struct Functional {
    pub coords: DVector<Complex>,
    /// Relative size of the part that no sampled element can see.
    pub residual: f64,
}

impl Functional {
    pub fn is_unbounded(&self) -> bool {
        self.residual > UNBOUNDED_RESIDUAL
    }
}

impl EvaluationBasis {
    /// `values[(j, i)]` is the `i`-th spanning function at sample `j`.
    pub fn new(values: DMatrix<Complex>, rel_tol: f64) -> Result<Self> {
        let (n, m) = values.shape();
        if n == 0 || m == 0 {
            return Err(Error::InvalidInput("empty evaluation matrix".into()));
        }
        if values.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFinite("evaluation matrix"));
        }
        let inv_sqrt_n = 1.0 / (n as f64).sqrt();
        let mut scaled = values;
        let mut col_scale = Vec::with_capacity(m);
        for mut col in scaled.column_iter_mut() {
            let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() * inv_sqrt_n;
            let s = if norm > 0.0 { norm } else { 1.0 };
            col.unscale_mut(s * (n as f64).sqrt());
            col_scale.push(s);
        }
        let svd = checked_svd(scaled)?;
        let s = &svd.singular_values;
        let top = s[0];
        let rank = if top > 0.0 {
            s.iter().take_while(|&&x| x > rel_tol * top).count()
        } else {
            0
        };
        if rank == 0 {
            return Err(Error::DegenerateConstraint);
        }
        let u = svd.u.expect("requested");
        let v_t = svd.v_t.expect("requested");
        let q = u.columns(0, rank).scale((n as f64).sqrt());
        Ok(Self {
            q,
            v_t: v_t.rows(0, rank).into_owned(),
            sigma: s.iter().take(rank).copied().collect(),
            col_scale,
            columns: m,
        })
    }

    pub fn samples(&self) -> usize {
        self.q.nrows()
    }

    pub fn rank(&self) -> usize {
        self.q.ncols()
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn q(&self) -> &DMatrix<Complex> {
        &self.q
    }

    /// Expresses `ℓ(P) = Σ_i v_i c_i` (for `P = Σ_i c_i f_i`) in the
    /// orthonormal coordinates.
    pub fn functional(&self, v: &[Complex]) -> Result<Functional> {
        if v.len() != self.columns {
            return Err(Error::InvalidInput(format!(
                "functional has {} entries, basis has {} columns",
                v.len(),
                self.columns
            )));
        }
        let scaled: Vec<Complex> = v.iter().zip(&self.col_scale).map(|(a, s)| a / s).collect();
        let r = self.rank();
        let mut coords = DVector::zeros(r);
        let mut proj = vec![Complex::new(0.0, 0.0); self.columns];
        for k in 0..r {
            let row = self.v_t.row(k);
            let a: Complex = row.iter().zip(&scaled).map(|(t, x)| t.conj() * x).sum();
            coords[k] = a / self.sigma[k];
            for (p, t) in proj.iter_mut().zip(row.iter()) {
                *p += t * a;
            }
        }
        let total = scaled.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let off = scaled
            .iter()
            .zip(&proj)
            .map(|(x, p)| (x - p).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if total == 0.0 {
            return Err(Error::DegenerateConstraint);
        }
        Ok(Functional {
            coords,
            residual: off / total,
        })
    }
}

type ComplexSvd = SVD<Complex, nalgebra::Dyn, nalgebra::Dyn>;

fn reconstructs(u: &DMatrix<Complex>, s: &DVector<f64>, v_t: &DMatrix<Complex>, m: &DMatrix<Complex>) -> bool {
    let mut us = u.clone();
    for (mut col, &x) in us.column_iter_mut().zip(s.iter()) {
        col.scale_mut(x);
    }
    (us * v_t - m).norm() <= 1e-11 * m.norm().max(f64::MIN_POSITIVE)
}

fn try_svd(m: &DMatrix<Complex>) -> Option<ComplexSvd> {
    for eps in [5.0 * f64::EPSILON, 1e-14, 1e-13] {
        let Some(svd) = SVD::try_new(m.clone(), true, true, eps, 0) else {
            continue;
        };
        if let (Some(u), Some(v_t)) = (&svd.u, &svd.v_t) {
            if reconstructs(u, &svd.singular_values, v_t, m) {
                return Some(svd);
            }
        }
    }
    None
}

/// SVD with a reconstruction check. The implicit-shift iteration can stop
/// on a wrong factorization, notably for matrices with many repeated
/// columns, so it falls back to the SVD of the triangular QR factor and of
/// its adjoint.
fn checked_svd(m: DMatrix<Complex>) -> Result<ComplexSvd> {
    if let Some(svd) = try_svd(&m) {
        return Ok(svd);
    }
    if m.nrows() >= m.ncols() {
        let qr = m.clone().qr();
        let (q, r) = (qr.q(), qr.r());
        let via_r = try_svd(&r).map(|svd| (svd.u.unwrap(), svd.singular_values, svd.v_t.unwrap()));
        let via_adjoint = || {
            try_svd(&r.adjoint()).map(|svd| (svd.v_t.unwrap().adjoint(), svd.singular_values, svd.u.unwrap().adjoint()))
        };
        if let Some((u_r, s, v_t)) = via_r.or_else(via_adjoint) {
            let u = &q * u_r;
            if reconstructs(&u, &s, &v_t, &m) {
                return Ok(SVD {
                    u: Some(u),
                    v_t: Some(v_t),
                    singular_values: s,
                });
            }
        }
    }
    Err(Error::LinearAlgebra("SVD failed its reconstruction check".into()))
}

/// Outcome of one Lawson run.
#[derive(Debug, Clone)]
pub struct LawsonSolution {
    /// `log max{|ℓ(P)| : max_j |P_j| ≤ 1}` from the best feasible iterate,
    /// floored at `floor_log`.
    pub log_lower: f64,
    /// Dual bound `½ log(uᵀ G⁻¹ ū)`, or `+∞` if no exact solve succeeded.
    pub log_upper: f64,
    /// Orthonormal coordinates of the best iterate, normalized to `ℓ = 1`.
    pub coords: Vec<Complex>,
    /// Sample values of the best iterate.
    pub values: Vec<Complex>,
    /// Weights used for the final solve; they sum to 1.
    pub weights: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Solves `G g = rhs` with `G = Qᴴ W Q` through a QR factorization of
/// `√W Q`, returning `g`, `rhsᴴ G⁻¹ rhs`, and whether the solve was exact.
fn solve_weighted(q: &DMatrix<Complex>, weights: &[f64], rhs: &DVector<Complex>) -> (DVector<Complex>, f64, bool) {
    let mut b = q.clone();
    for (mut row, &w) in b.row_iter_mut().zip(weights) {
        row.scale_mut(w.sqrt());
    }
    let r = b.clone().qr().r();
    let diag_max = r.diagonal().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let solvable = diag_max > 0.0 && r.diagonal().iter().all(|z| z.norm() > 1e-15 * diag_max);
    if solvable {
        if let Some(z) = r.adjoint().solve_lower_triangular(rhs) {
            if let Some(x) = r.solve_upper_triangular(&z) {
                if x.iter().all(|v| v.is_finite()) {
                    return (x, z.norm_squared(), true);
                }
            }
        }
    }
    // Weights concentrated on fewer samples than the rank leave G singular.
    // A ridge keeps the iterate well defined; its dual value is not a bound.
    let g = b.ad_mul(&b);
    let n = g.nrows();
    let trace: f64 = (0..n).map(|i| g[(i, i)].re).sum();
    let mut ridge = 1e-14 * trace / n as f64;
    loop {
        let mut reg = g.clone();
        for i in 0..n {
            reg[(i, i)] += Complex::new(ridge, 0.0);
        }
        let x = Cholesky::new(reg.clone())
            .map(|ch| ch.solve(rhs))
            .or_else(|| reg.lu().solve(rhs));
        if let Some(x) = x {
            let dual = rhs.dotc(&x).re;
            return (x, dual, false);
        }
        ridge *= 100.0;
    }
}

/// Runs Lawson's iteration for `min max_j |(Q y)_j|` subject to `uᵀ y = 1`.
pub fn lawson(q: &DMatrix<Complex>, u: &DVector<Complex>, floor_log: f64, opts: &LawsonOptions) -> Result<LawsonSolution> {
    let n = q.nrows();
    let rhs = u.map(|z| z.conj());
    let mut weights = vec![1.0 / n as f64; n];
    let mut best = LawsonSolution {
        log_lower: floor_log,
        log_upper: f64::INFINITY,
        coords: Vec::new(),
        values: Vec::new(),
        weights: weights.clone(),
        iterations: 0,
        converged: false,
    };
    let mut best_sup = f64::INFINITY;
    let mut prev_sup: Option<f64> = None;
    for it in 1..=opts.max_iter {
        let (g, dual, exact) = solve_weighted(q, &weights, &rhs);
        let denom: Complex = u.iter().zip(g.iter()).map(|(a, b)| a * b).sum();
        if !denom.is_finite() || denom.norm() == 0.0 {
            return Err(Error::LinearAlgebra("weighted normal equations broke down".into()));
        }
        let y = g.map(|z| z / denom);
        let p = q * &y;
        let sup = p.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !(sup > 0.0) || !sup.is_finite() {
            return Err(Error::LinearAlgebra(format!("iterate sup {sup}")));
        }
        best.iterations = it;
        best.weights.copy_from_slice(&weights);
        if exact && dual > 0.0 {
            best.log_upper = best.log_upper.min(0.5 * dual.ln());
        }
        if sup < best_sup {
            best_sup = sup;
            best.coords = y.iter().copied().collect();
            best.values = p.iter().copied().collect();
            best.log_lower = best.log_lower.max(-sup.ln());
        }
        if best.log_upper - best.log_lower < opts.gap_tol {
            best.converged = true;
            break;
        }
        if let Some(prev) = prev_sup {
            if (prev - sup).abs() < opts.stagnation_tol * sup {
                best.converged = true;
                break;
            }
        }
        prev_sup = Some(sup);

        let mut total = 0.0;
        for (w, z) in weights.iter_mut().zip(p.iter()) {
            *w = (*w * z.norm()).max(opts.weight_floor);
            total += *w;
        }
        if opts.mixing_period > 0 && it % opts.mixing_period == 0 {
            for w in weights.iter_mut() {
                *w += opts.mixing * total;
            }
            total *= 1.0 + opts.mixing * n as f64;
        }
        for w in weights.iter_mut() {
            *w /= total;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::unit_roots;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    /// Columns `ζ^k`, `k = 0..=d`, on `n` roots of unity.
    fn disk_matrix(n: usize, d: usize) -> DMatrix<Complex> {
        let z = unit_roots(n);
        DMatrix::from_fn(n, d + 1, |j, k| z[j].powu(k as u32))
    }

    #[test]
    fn orthonormal_columns() {
        let b = EvaluationBasis::new(disk_matrix(64, 6), RANK_TOL).unwrap();
        assert_eq!(b.rank(), 7);
        let gram = b.q().ad_mul(b.q()).unscale(64.0);
        for i in 0..7 {
            for j in 0..7 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((gram[(i, j)] - c(want, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn repeated_columns_drop_rank() {
        let mut m = disk_matrix(32, 2);
        m = m.insert_column(3, c(0.0, 0.0));
        for j in 0..32 {
            m[(j, 3)] = m[(j, 1)] * 2.0;
        }
        let b = EvaluationBasis::new(m, RANK_TOL).unwrap();
        assert_eq!(b.rank(), 3);
        // ℓ(c) = c_1 + 2 c_3 sees only the combined direction c_1 f_1 + c_3 f_3.
        let f = b.functional(&[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]).unwrap();
        assert!(!f.is_unbounded());
        let f = b.functional(&[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(f.is_unbounded());
    }

    #[test]
    fn heavily_repeated_columns_factor() {
        // ζ^a w^b on the graph w = ζ²: 28 columns, 13 distinct.
        let z = unit_roots(256);
        let pairs: Vec<(u32, u32)> = (0..=6).flat_map(|t| (0..=t).map(move |b| (t - b, b))).collect();
        let m = DMatrix::from_fn(256, pairs.len(), |j, i| z[j].powu(pairs[i].0 + 2 * pairs[i].1));
        let b = EvaluationBasis::new(m, RANK_TOL).unwrap();
        assert_eq!(b.rank(), 13);
    }

    #[test]
    fn point_evaluation_in_disk_is_one() {
        // Maximum principle: evaluation at an interior point of the disk.
        let b = EvaluationBasis::new(disk_matrix(128, 8), RANK_TOL).unwrap();
        let x = c(0.3, 0.4);
        let v: Vec<Complex> = (0..9).map(|k| x.powu(k)).collect();
        let f = b.functional(&v).unwrap();
        let sol = lawson(b.q(), &f.coords, 0.0, &LawsonOptions::default()).unwrap();
        assert!(sol.converged);
        assert!(sol.log_lower.abs() < 1e-9 && sol.log_lower <= 1e-15);
        assert!(sol.log_upper >= sol.log_lower - 1e-12);
        assert!((sol.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn derivative_functional() {
        // max |P'(0)| over sup-normalized P of degree ≤ 3 is 1 (attained by ζ).
        let b = EvaluationBasis::new(disk_matrix(64, 3), RANK_TOL).unwrap();
        let v = [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let f = b.functional(&v).unwrap();
        let sol = lawson(b.q(), &f.coords, f64::NEG_INFINITY, &LawsonOptions::default()).unwrap();
        assert!(sol.log_lower.abs() < 1e-6, "{}", sol.log_lower);
        assert!(sol.log_upper >= sol.log_lower - 1e-12);
    }
}
