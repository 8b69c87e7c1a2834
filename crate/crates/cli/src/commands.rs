//! One function per subcommand. Each returns the files it produced, in the
//! order they are written; nothing here touches the file system except
//! measure files named by the config.

use std::fmt::Write as _;
use std::path::Path;

use hull_core::extremal::{
    default_samples, fmt_real, hull_scan, lambda_d, module_norm_sweep, oracle_lambda_d, scan_csv, ScanOptions,
};
use hull_core::hardy::run_pipeline_for;
use hull_core::membership::verify_membership;
use hull_core::series::{crossover_degree, sample_curve, BiPowerSeries, PhiDescriptor};
use hull_core::witness::{exclusion_certificate, select_alpha0, ExclusionOptions, WitnessReport};
use hull_core::{Complex, Error};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{
    DescriptorConfig, HardyConfig, MembershipConfig, ModuleNormConfig, OracleConfig, ScanConfig, WitnessConfig,
};
use crate::CliError;

pub type Output = (String, Vec<u8>);

fn json_file(name: &str, value: &Value) -> Output {
    let mut text = serde_json::to_string_pretty(value).expect("value serializes");
    text.push('\n');
    (name.to_string(), text.into_bytes())
}

fn cert_index(series: &mut BiPowerSeries, radius: f64) -> Result<usize, CliError> {
    if let Some(i) = series
        .certs()
        .iter()
        .position(|c| (c.radius - radius).abs() <= 1e-12 * radius)
    {
        return Ok(i);
    }
    let cert = series.fit_cert(radius).map_err(CliError::core)?;
    series.push_cert(cert).map_err(CliError::core)?;
    Ok(series.certs().len() - 1)
}

fn tail_table(series: &BiPowerSeries, idx: usize, cfg: &WitnessConfig) -> Result<Value, CliError> {
    let crossover = crossover_degree();
    let degrees = cfg.tail_degrees.clone().unwrap_or_else(|| (crossover..=16).collect());
    let rows = degrees
        .par_iter()
        .map(|&d| -> Result<Value, CliError> {
            let t = series.tail_bound(d, idx).map_err(CliError::core)?;
            let row = match series.sup_eps_on_circle(d, cfg.tail_radius, cfg.tail_samples) {
                Ok(measured) => {
                    let limit = if t.past_crossover { t.bound() } else { t.refined() };
                    json!({
                        "d": d,
                        "bound": t.bound(),
                        "refined": t.refined(),
                        "past_crossover": t.past_crossover,
                        "measured_sup": measured,
                        "holds": measured <= limit,
                    })
                }
                Err(e) => json!({
                    "d": d,
                    "bound": t.bound(),
                    "refined": t.refined(),
                    "past_crossover": t.past_crossover,
                    "error": e.to_string(),
                }),
            };
            Ok(row)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let cert = series.certs()[idx];
    Ok(json!({
        "cert": {"R": cert.radius, "C_R": cert.constant, "empirical": cert.empirical},
        "crossover": crossover,
        "radius": cfg.tail_radius,
        "samples": cfg.tail_samples,
        "rows": rows,
    }))
}

fn certificate_json(report: &WitnessReport) -> Value {
    let mut v = report.to_json();
    v["excluded"] = json!(report.verdict.excludes());
    v
}

pub fn witness(cfg: &WitnessConfig) -> Result<Vec<Output>, CliError> {
    let mut series = cfg
        .series
        .clone()
        .into_series()
        .map_err(|e| CliError::Config(format!("series: {e}")))?;
    let idx = cert_index(&mut series, cfg.cert_r)?;
    let top = cfg.degrees.iter().copied().max().unwrap_or(1) as usize;
    let n = cfg
        .samples
        .unwrap_or_else(|| (16 * top + 16).next_power_of_two().max(64));
    let curve = sample_curve(&PhiDescriptor::bi_series(series.clone()), n).map_err(CliError::core)?;
    let opts = ExclusionOptions {
        escape_margin: cfg.escape_margin,
    };

    let mut files = Vec::new();
    let mut doc = json!({});
    if let Some(grid) = &cfg.alpha_grid {
        let results: Vec<_> = grid
            .points()
            .into_par_iter()
            .map(|a| (a, exclusion_certificate(&series, a, &cfg.degrees, &curve, &opts)))
            .collect();
        let mut csv = String::from("re_alpha0,im_alpha0,abs_tau");
        for d in &cfg.degrees {
            let _ = write!(csv, ",g_d{d}");
        }
        csv.push_str(",verdict\n");
        let points = results.len();
        let mut excluded = 0;
        for (a, r) in results {
            let _ = write!(csv, "{},{}", fmt_real(a.re), fmt_real(a.im));
            match r {
                Ok(rep) => {
                    let _ = write!(csv, ",{}", fmt_real(rep.tau.norm()));
                    for row in &rep.rows {
                        let _ = write!(csv, ",{}", fmt_real(row.g));
                    }
                    let _ = writeln!(csv, ",{}", rep.verdict.as_str());
                    excluded += usize::from(rep.verdict.excludes());
                }
                Err(e) => {
                    if e.is_contract_violation() {
                        return Err(CliError::core(e));
                    }
                    let (tau, label) = match e {
                        Error::TauVanishes(t) => (t, "tau_vanishes"),
                        _ => (f64::NAN, "error"),
                    };
                    let _ = write!(csv, ",{}", fmt_real(tau));
                    for _ in &cfg.degrees {
                        csv.push_str(",nan");
                    }
                    let _ = writeln!(csv, ",{label}");
                }
            }
        }
        doc["alpha_scan"] = json!({"points": points, "excluded": excluded, "file": "witness_scan.csv"});
        files.push(("witness_scan.csv".to_string(), csv.into_bytes()));
    } else {
        let (alpha0, selection) = match cfg.alpha0 {
            Some(a) => (Complex::new(a[0], a[1]), "given"),
            None => (select_alpha0(&series).map_err(CliError::core)?.0, "annulus_scan"),
        };
        let report = exclusion_certificate(&series, alpha0, &cfg.degrees, &curve, &opts).map_err(CliError::core)?;
        doc["alpha_selection"] = json!(selection);
        doc["samples"] = json!(n);
        doc["certificate"] = certificate_json(&report);
    }
    doc["tail"] = tail_table(&series, idx, cfg)?;
    files.insert(0, json_file("witness.json", &doc));
    Ok(files)
}

pub fn scan(cfg: &ScanConfig) -> Result<Vec<Output>, CliError> {
    let desc = cfg.descriptor.build()?;
    let opts = ScanOptions {
        ladder: cfg.degrees.clone(),
        samples: cfg.samples,
        classify: cfg.tolerances.options(),
    };
    let curve = sample_curve(&desc, opts.samples_for_ladder()).map_err(CliError::core)?;
    let rows = hull_scan(&curve, &cfg.grid.to_spec(), &opts).map_err(CliError::core)?;
    Ok(vec![("scan.csv".to_string(), scan_csv(&rows, &cfg.degrees).into_bytes())])
}

pub fn membership(cfg: &MembershipConfig) -> Result<Vec<Output>, CliError> {
    let desc = cfg.descriptor.build()?;
    let zeta0 = Complex::new(cfg.zeta0[0], cfg.zeta0[1]);
    let report = verify_membership(&desc, zeta0, cfg.d_max, cfg.trials, cfg.seed).map_err(CliError::core)?;
    let mut doc = report.to_json();
    doc["seed"] = json!(cfg.seed);
    doc["trials"] = json!(cfg.trials);
    doc["max_slack"] = json!(report.max_slack());
    Ok(vec![json_file("membership.json", &doc)])
}

pub fn module_norm(cfg: &ModuleNormConfig) -> Result<Vec<Output>, CliError> {
    let desc = cfg.descriptor.build()?;
    let x = Complex::new(cfg.x_zeta[0], cfg.x_zeta[1]);
    let phi_x = match cfg.phi_at_x {
        Some(p) => Complex::new(p[0], p[1]),
        None => desc.eval(x).map_err(CliError::core)?,
    };
    let top = cfg.degrees.iter().copied().max().unwrap_or(0);
    let n = cfg.samples.unwrap_or_else(|| default_samples(top));
    let curve = sample_curve(&desc, n).map_err(CliError::core)?;
    let results =
        module_norm_sweep(&curve, phi_x, x, &cfg.degrees, &cfg.tolerances.options()).map_err(CliError::core)?;
    let mut csv = String::from("d,log_norm,norm,rank,rank_deficient,unbounded,converged,iterations\n");
    for r in &results {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            r.degree,
            fmt_real(r.log_norm),
            fmt_real(r.value()),
            r.rank,
            r.rank_deficient,
            r.unbounded,
            r.converged,
            r.iterations
        );
    }
    Ok(vec![("module_norm.csv".to_string(), csv.into_bytes())])
}

pub fn hardy(cfg: &HardyConfig, base: &Path) -> Result<Vec<Output>, CliError> {
    let sigma = cfg.measure.build(base)?;
    let desc = cfg.descriptor.build()?;
    let report = run_pipeline_for(&sigma, &desc, cfg.samples, cfg.tol).map_err(CliError::core)?;
    Ok(vec![json_file("hardy.json", &report.to_json(cfg.coeff_floor))])
}

fn label(d: &DescriptorConfig) -> String {
    match d {
        DescriptorConfig::Builtin(name) => name.clone(),
        DescriptorConfig::Rational { .. } => "rational".into(),
        DescriptorConfig::Laurent { .. } => "laurent".into(),
        DescriptorConfig::Series(_) => "series".into(),
    }
}

/// Log-domain tolerance for comparing the two routes at `phase_count`.
pub fn oracle_tolerance(phase_count: usize) -> f64 {
    1e-3 - (std::f64::consts::PI / phase_count as f64).cos().ln()
}

pub fn oracle(cfg: &OracleConfig) -> Result<Vec<Output>, CliError> {
    let lawson = cfg.tolerances.options();
    let tol = oracle_tolerance(cfg.phase_count);
    let mut jobs = Vec::new();
    for (i, case) in cfg.cases.iter().enumerate() {
        let curve = sample_curve(&case.descriptor.build()?, cfg.samples).map_err(CliError::core)?;
        let p = case.point;
        let x = (Complex::new(p[0], p[1]), Complex::new(p[2], p[3]));
        for &d in &cfg.degrees {
            jobs.push((i, curve.clone(), x, d));
        }
    }
    let rows = jobs
        .into_par_iter()
        .map(|(i, curve, x, d)| -> Result<String, CliError> {
            let fast = lambda_d(&curve, x, d, &lawson).map_err(CliError::core)?;
            let lp = oracle_lambda_d(&curve, x, d, cfg.phase_count).map_err(CliError::core)?;
            let (a, b) = (fast.log_lambda, lp.log_value);
            let diff = if fast.unbounded && lp.unbounded {
                0.0
            } else if fast.unbounded || lp.unbounded {
                f64::INFINITY
            } else {
                (a - b).abs()
            };
            Ok(format!(
                "{i},{},{},{},{},{},{d},{},{},{},{},{},{},{}\n",
                label(&cfg.cases[i].descriptor),
                fmt_real(x.0.re),
                fmt_real(x.0.im),
                fmt_real(x.1.re),
                fmt_real(x.1.im),
                fmt_real(a),
                fmt_real(b),
                fmt_real(diff),
                fmt_real(tol),
                diff <= tol,
                fast.unbounded,
                lp.unbounded
            ))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut csv = String::from(
        "case,descriptor,re_zeta,im_zeta,re_w,im_w,d,log_lambda,log_oracle,abs_diff,tolerance,agree,unbounded,oracle_unbounded\n",
    );
    rows.iter().for_each(|r| csv.push_str(r));
    Ok(vec![("oracle.csv".to_string(), csv.into_bytes())])
}
