//! Grids of points classified against one curve, and their CSV form.

use std::fmt::Write as _;

use rayon::prelude::*;

use super::{classify_prepared, default_samples, prepare_ladder, ClassifyOptions, HullClassification, DEFAULT_LADDER};
use crate::numeric::unit_root;
use crate::series::SampledCurve;
use crate::{Complex, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum GridSpec {
    /// Graph points `(ζ₀, φ(ζ₀))` with `|ζ₀|` evenly spaced over
    /// `[r_min, r_max]` (outer index) and `arg ζ₀ = 2πj/angles` (inner).
    Polar {
        radii: usize,
        angles: usize,
        r_min: f64,
        r_max: f64,
    },
    /// The fiber over `zeta`: `w` on a `rows × cols` rectangle, rows over the
    /// imaginary range (outer), columns over the real range (inner).
    Fiber {
        zeta: Complex,
        re: (f64, f64),
        im: (f64, f64),
        rows: usize,
        cols: usize,
    },
    Points(Vec<(Complex, Complex)>),
}

impl GridSpec {
    pub const DEFAULT_R_MIN: f64 = 0.05;
    pub const DEFAULT_R_MAX: f64 = 0.95;

    pub fn polar(radii: usize, angles: usize) -> Self {
        GridSpec::Polar {
            radii,
            angles,
            r_min: Self::DEFAULT_R_MIN,
            r_max: Self::DEFAULT_R_MAX,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            GridSpec::Polar { radii, angles, .. } => radii * angles,
            GridSpec::Fiber { rows, cols, .. } => rows * cols,
            GridSpec::Points(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The `ζ` coordinate of every grid point, row-major, plus the `w`
    /// coordinate where the grid fixes it.
    fn layout(&self) -> Result<Vec<(Complex, Option<Complex>)>> {
        if self.is_empty() {
            return Err(Error::InvalidInput("empty grid".into()));
        }
        let spread = |lo: f64, hi: f64, k: usize, i: usize| {
            if k == 1 {
                0.5 * (lo + hi)
            } else {
                lo + (hi - lo) * i as f64 / (k - 1) as f64
            }
        };
        Ok(match self {
            GridSpec::Polar {
                radii,
                angles,
                r_min,
                r_max,
            } => {
                if !(0.0 <= *r_min && r_min <= r_max && *r_max < 1.0) {
                    return Err(Error::InvalidInput(format!(
                        "polar radii [{r_min}, {r_max}] must lie in [0, 1)"
                    )));
                }
                (0..*radii)
                    .flat_map(|i| {
                        let r = spread(*r_min, *r_max, *radii, i);
                        (0..*angles).map(move |j| (unit_root(j, *angles) * r, None))
                    })
                    .collect()
            }
            GridSpec::Fiber {
                zeta,
                re,
                im,
                rows,
                cols,
            } => (0..*rows)
                .flat_map(|i| {
                    let y = spread(im.0, im.1, *rows, i);
                    (0..*cols).map(move |j| (*zeta, Some(Complex::new(spread(re.0, re.1, *cols, j), y))))
                })
                .collect(),
            GridSpec::Points(p) => p.iter().map(|&(z, w)| (z, Some(w))).collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanOptions {
    pub ladder: Vec<u32>,
    /// Curve resolution; defaults to [`default_samples`] of the top degree.
    pub samples: Option<usize>,
    pub classify: ClassifyOptions,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            ladder: DEFAULT_LADDER.to_vec(),
            samples: None,
            classify: ClassifyOptions::default(),
        }
    }
}

impl ScanOptions {
    pub fn samples_for_ladder(&self) -> usize {
        self.samples
            .unwrap_or_else(|| default_samples(self.ladder.last().copied().unwrap_or(0)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub index: usize,
    pub zeta: Complex,
    /// `None` when `φ(ζ₀)` could not be evaluated.
    pub w: Option<Complex>,
    pub outcome: std::result::Result<HullClassification, String>,
}

/// Classifies every grid point; per-point failures are kept in their row.
/// Rows come back in grid order.
pub fn hull_scan(curve: &SampledCurve, grid: &GridSpec, opts: &ScanOptions) -> Result<Vec<ScanRow>> {
    let layout = grid.layout()?;
    let problems = prepare_ladder(curve, &opts.ladder)?;
    let desc = curve.descriptor();
    Ok(layout
        .into_par_iter()
        .enumerate()
        .map(|(index, (zeta, w))| {
            let w = match w {
                Some(w) => Ok(w),
                None => desc.eval(zeta),
            };
            match w {
                Ok(w) => ScanRow {
                    index,
                    zeta,
                    w: Some(w),
                    outcome: classify_prepared(&problems, (zeta, w), &opts.classify).map_err(|e| e.to_string()),
                },
                Err(e) => ScanRow {
                    index,
                    zeta,
                    w: None,
                    outcome: Err(e.to_string()),
                },
            }
        })
        .collect())
}

/// Shortest-round-trip-safe fixed formatting: 17 significant digits.
pub fn fmt_real(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

/// CSV with one header row and one line per scan row. Rows that failed get
/// verdict `error` and `nan` in the numeric columns.
pub fn scan_csv(rows: &[ScanRow], ladder: &[u32]) -> String {
    let mut out = String::from("re_zeta,im_zeta,re_w,im_w");
    for d in ladder {
        let _ = write!(out, ",slope_d{d}");
    }
    out.push_str(",fitted_slope,verdict,C_estimate,converged_all\n");
    for row in rows {
        let w = row.w.unwrap_or(Complex::new(f64::NAN, f64::NAN));
        let _ = write!(
            out,
            "{},{},{},{}",
            fmt_real(row.zeta.re),
            fmt_real(row.zeta.im),
            fmt_real(w.re),
            fmt_real(w.im)
        );
        match &row.outcome {
            Ok(c) => {
                for s in &c.slopes {
                    let _ = write!(out, ",{}", fmt_real(*s));
                }
                let _ = writeln!(
                    out,
                    ",{},{},{},{}",
                    fmt_real(c.fitted_slope),
                    c.verdict.as_str(),
                    fmt_real(c.c_estimate),
                    c.converged_all
                );
            }
            Err(_) => {
                for _ in ladder {
                    out.push_str(",nan");
                }
                out.push_str(",nan,error,nan,false\n");
            }
        }
    }
    out
}
