//! Run configuration: one JSON document per run, with defaults filled in
//! and echoed back into the manifest.

use std::path::Path;

use hull_core::extremal::{ClassifyOptions, GridSpec, LawsonOptions, DEFAULT_IN_TOL, DEFAULT_LADDER, DEFAULT_OUT_MARGIN};
use hull_core::hardy::{CircleMeasure, DEFAULT_SAMPLES, DEFAULT_TOL};
use hull_core::series::io::SeriesFile;
use hull_core::series::{LaurentPoly, PhiDescriptor};
use hull_core::witness::DEFAULT_ESCAPE_MARGIN;
use hull_core::Complex;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub type Pair = [f64; 2];

fn c(p: Pair) -> Complex {
    Complex::new(p[0], p[1])
}

/// How `φ` is specified in a config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DescriptorConfig {
    Builtin(String),
    /// Ascending coefficients `[re, im]` in ζ.
    Rational {
        numerator: Vec<Pair>,
        denominator: Vec<Pair>,
    },
    /// Coefficients `[re, im]` of `ζ^lowest, ζ^(lowest+1), …`.
    Laurent { lowest: i64, coeffs: Vec<Pair> },
    Series(SeriesFile),
}

impl DescriptorConfig {
    pub fn builtin(name: &str) -> Self {
        DescriptorConfig::Builtin(name.into())
    }

    pub fn build(&self) -> Result<PhiDescriptor, CliError> {
        let built = match self {
            DescriptorConfig::Builtin(name) => PhiDescriptor::builtin(name),
            DescriptorConfig::Rational {
                numerator,
                denominator,
            } => PhiDescriptor::rational(
                numerator.iter().copied().map(c).collect(),
                denominator.iter().copied().map(c).collect(),
            ),
            DescriptorConfig::Laurent { lowest, coeffs } => {
                PhiDescriptor::laurent(LaurentPoly::new(*lowest, coeffs.iter().copied().map(c).collect()))
            }
            DescriptorConfig::Series(file) => file.clone().into_series().map(PhiDescriptor::bi_series),
        };
        built.map_err(|e| CliError::Config(format!("descriptor: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GridConfig {
    Polar {
        radii: usize,
        angles: usize,
        #[serde(default = "r_min")]
        r_min: f64,
        #[serde(default = "r_max")]
        r_max: f64,
    },
    Fiber {
        zeta: Pair,
        re: Pair,
        im: Pair,
        rows: usize,
        cols: usize,
    },
    /// `[re ζ, im ζ, re w, im w]` per point.
    Points(Vec<[f64; 4]>),
}

fn r_min() -> f64 {
    GridSpec::DEFAULT_R_MIN
}

fn r_max() -> f64 {
    GridSpec::DEFAULT_R_MAX
}

impl GridConfig {
    pub fn to_spec(&self) -> GridSpec {
        match self {
            GridConfig::Polar {
                radii,
                angles,
                r_min,
                r_max,
            } => GridSpec::Polar {
                radii: *radii,
                angles: *angles,
                r_min: *r_min,
                r_max: *r_max,
            },
            GridConfig::Fiber {
                zeta,
                re,
                im,
                rows,
                cols,
            } => GridSpec::Fiber {
                zeta: c(*zeta),
                re: (re[0], re[1]),
                im: (im[0], im[1]),
                rows: *rows,
                cols: *cols,
            },
            GridConfig::Points(p) => {
                GridSpec::Points(p.iter().map(|q| (Complex::new(q[0], q[1]), Complex::new(q[2], q[3]))).collect())
            }
        }
    }
}

/// Polar grid of `α₀` values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphaGrid {
    pub radii: usize,
    pub angles: usize,
    pub r_min: f64,
    pub r_max: f64,
}

impl AlphaGrid {
    /// Row-major: radius outer, angle inner, both endpoints included.
    pub fn points(&self) -> Vec<Complex> {
        let spread = |i: usize| {
            if self.radii == 1 {
                0.5 * (self.r_min + self.r_max)
            } else {
                self.r_min + (self.r_max - self.r_min) * i as f64 / (self.radii - 1) as f64
            }
        };
        (0..self.radii)
            .flat_map(|i| {
                let r = spread(i);
                (0..self.angles).map(move |j| {
                    Complex::from_polar(r, 2.0 * std::f64::consts::PI * j as f64 / self.angles as f64)
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LawsonConfig {
    pub max_iter: usize,
    pub stagnation_tol: f64,
    pub gap_tol: f64,
}

impl Default for LawsonConfig {
    fn default() -> Self {
        let d = LawsonOptions::default();
        Self {
            max_iter: d.max_iter,
            stagnation_tol: d.stagnation_tol,
            gap_tol: d.gap_tol,
        }
    }
}

impl LawsonConfig {
    pub fn options(&self) -> LawsonOptions {
        LawsonOptions {
            max_iter: self.max_iter,
            stagnation_tol: self.stagnation_tol,
            gap_tol: self.gap_tol,
            ..LawsonOptions::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanTolerances {
    pub in_tol: f64,
    pub out_margin: f64,
    pub lawson: LawsonConfig,
}

impl Default for ScanTolerances {
    fn default() -> Self {
        Self {
            in_tol: DEFAULT_IN_TOL,
            out_margin: DEFAULT_OUT_MARGIN,
            lawson: LawsonConfig::default(),
        }
    }
}

impl ScanTolerances {
    pub fn options(&self) -> ClassifyOptions {
        ClassifyOptions {
            in_tol: self.in_tol,
            out_margin: self.out_margin,
            lawson: self.lawson.options(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WitnessConfig {
    pub series: SeriesFile,
    /// Fixed `α₀`; when absent (and no grid) the annulus scan picks it.
    pub alpha0: Option<Pair>,
    pub alpha_grid: Option<AlphaGrid>,
    pub degrees: Vec<u32>,
    /// Curve resolution; defaults to a power of two ≥ 16·max degree + 16.
    pub samples: Option<usize>,
    pub escape_margin: f64,
    #[serde(rename = "cert_R")]
    pub cert_r: f64,
    /// Degrees of the tail-bound table; defaults to crossover..=16.
    pub tail_degrees: Option<Vec<u32>>,
    pub tail_radius: f64,
    pub tail_samples: usize,
    pub seed: u64,
    pub threads: Option<usize>,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        Self {
            series: SeriesFile::Builtin {
                builtin: "exp_conj".into(),
            },
            alpha0: None,
            alpha_grid: None,
            degrees: vec![8, 16, 32],
            samples: None,
            escape_margin: DEFAULT_ESCAPE_MARGIN,
            cert_r: 8.0,
            tail_degrees: None,
            tail_radius: 2.0,
            tail_samples: 4096,
            seed: 0,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub descriptor: DescriptorConfig,
    pub grid: GridConfig,
    pub degrees: Vec<u32>,
    pub samples: Option<usize>,
    pub tolerances: ScanTolerances,
    pub seed: u64,
    pub threads: Option<usize>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            descriptor: DescriptorConfig::builtin("square"),
            grid: GridConfig::Polar {
                radii: 10,
                angles: 10,
                r_min: r_min(),
                r_max: r_max(),
            },
            degrees: DEFAULT_LADDER.to_vec(),
            samples: None,
            tolerances: ScanTolerances::default(),
            seed: 0,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MembershipConfig {
    pub descriptor: DescriptorConfig,
    pub zeta0: Pair,
    pub d_max: u32,
    pub trials: u32,
    pub seed: u64,
    pub threads: Option<usize>,
}

impl Default for MembershipConfig {
    fn default() -> Self {
        Self {
            descriptor: DescriptorConfig::builtin("pole1"),
            zeta0: [0.5, 0.0],
            d_max: 6,
            trials: 100,
            seed: 1,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModuleNormConfig {
    pub descriptor: DescriptorConfig,
    pub x_zeta: Pair,
    /// `φ(x)`; defaults to evaluating the descriptor at `x_zeta`.
    pub phi_at_x: Option<Pair>,
    pub degrees: Vec<u32>,
    pub samples: Option<usize>,
    pub tolerances: LawsonConfig,
    pub seed: u64,
    pub threads: Option<usize>,
}

impl Default for ModuleNormConfig {
    fn default() -> Self {
        Self {
            descriptor: DescriptorConfig::builtin("conj"),
            x_zeta: [0.5, 0.0],
            phi_at_x: None,
            degrees: vec![0, 1, 2, 4, 8, 12],
            samples: None,
            tolerances: LawsonConfig::default(),
            seed: 0,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureConfig {
    /// `[n, re, im]` triples.
    Coeffs(Vec<(i64, f64, f64)>),
    /// Path to a measure file, relative to the config file.
    File(String),
}

impl MeasureConfig {
    pub fn build(&self, base: &Path) -> Result<CircleMeasure, CliError> {
        match self {
            MeasureConfig::Coeffs(v) => {
                CircleMeasure::new(v.iter().map(|&(n, re, im)| (n, Complex::new(re, im))))
                    .map_err(|e| CliError::Config(format!("measure: {e}")))
            }
            MeasureConfig::File(p) => {
                let path = base.join(p);
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| CliError::Config(format!("measure file {}: {e}", path.display())))?;
                CircleMeasure::from_json(&text).map_err(|e| CliError::Config(format!("measure: {e}")))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HardyConfig {
    pub measure: MeasureConfig,
    pub descriptor: DescriptorConfig,
    pub samples: usize,
    pub tol: f64,
    /// `k` coefficients at or below this modulus are left out of the report.
    pub coeff_floor: f64,
    pub seed: u64,
    pub threads: Option<usize>,
}

impl Default for HardyConfig {
    fn default() -> Self {
        Self {
            measure: MeasureConfig::Coeffs(vec![(0, 1.0, 0.0)]),
            descriptor: DescriptorConfig::builtin("identity"),
            samples: DEFAULT_SAMPLES,
            tol: DEFAULT_TOL,
            coeff_floor: 1e-14,
            seed: 0,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleCase {
    pub descriptor: DescriptorConfig,
    /// `[re ζ, im ζ, re w, im w]`.
    pub point: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub cases: Vec<OracleCase>,
    pub degrees: Vec<u32>,
    pub samples: usize,
    pub phase_count: usize,
    pub tolerances: LawsonConfig,
    pub seed: u64,
    pub threads: Option<usize>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        let case = |name: &str, point| OracleCase {
            descriptor: DescriptorConfig::builtin(name),
            point,
        };
        Self {
            cases: vec![
                case("identity", [0.5, 0.0, 0.5, 0.0]),
                case("pole1", [0.5, 0.0, 2.0, 0.0]),
                case("conj", [0.5, 0.0, 2.0, 0.0]),
            ],
            degrees: vec![0, 1, 2],
            samples: 64,
            phase_count: 64,
            tolerances: LawsonConfig::default(),
            seed: 0,
            threads: None,
        }
    }
}

pub trait RunConfig: Serialize + for<'de> Deserialize<'de> + Send + Sync {
    fn seed_mut(&mut self) -> &mut u64;
    fn threads(&self) -> Option<usize>;
}

macro_rules! run_config {
    ($($t:ty),*) => {$(
        impl RunConfig for $t {
            fn seed_mut(&mut self) -> &mut u64 {
                &mut self.seed
            }
            fn threads(&self) -> Option<usize> {
                self.threads
            }
        }
    )*};
}

run_config!(WitnessConfig, ScanConfig, MembershipConfig, ModuleNormConfig, HardyConfig, OracleConfig);

pub fn parse<T: RunConfig>(text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
}
