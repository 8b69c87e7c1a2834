//! `hull-lab`: runs one scenario from a JSON config and writes its outputs,
//! plus a manifest with checksums, into an output directory.
//!
//! Exit codes: 0 success, 1 config or input error, 2 numerical-contract
//! violation, 3 I/O error.

pub mod commands;
pub mod config;

use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use config::RunConfig;

pub const THREADS_ENV: &str = "HULL_LAB_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical contract violated: {0}")]
    Contract(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn core(e: hull_core::Error) -> Self {
        if e.is_contract_violation() {
            CliError::Contract(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Contract(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Subcommand {
    Witness,
    Scan,
    Membership,
    ModuleNorm,
    Hardy,
    Oracle,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Witness => "witness",
            Subcommand::Scan => "scan",
            Subcommand::Membership => "membership",
            Subcommand::ModuleNorm => "module-norm",
            Subcommand::Hardy => "hardy",
            Subcommand::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "hull-lab", version, about = "Projective-hull certificates and extremal scans")]
pub struct Cli {
    #[arg(value_enum)]
    pub subcommand: Subcommand,
    /// JSON config; `{}` runs the defaults.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
    /// Worker threads; falls back to the config, then HULL_LAB_THREADS.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Overrides the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileRecord {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn resolve_threads(flag: Option<usize>, config: Option<usize>) -> Result<Option<usize>, CliError> {
    if let Some(n) = flag.or(config) {
        return Ok(Some(n));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Config(format!("{THREADS_ENV}={v} is not a thread count"))),
        Err(_) => Ok(None),
    }
}

fn execute<T: RunConfig>(
    cli: &Cli,
    text: &str,
    body: impl FnOnce(&T) -> Result<Vec<commands::Output>, CliError> + Send,
) -> Result<(serde_json::Value, Vec<commands::Output>), CliError> {
    let mut cfg: T = config::parse(text)?;
    if let Some(seed) = cli.seed {
        *cfg.seed_mut() = seed;
    }
    let threads = resolve_threads(cli.threads, cfg.threads())?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Config("thread count must be ≥ 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let outputs = pool.install(|| body(&cfg))?;
    let echoed = serde_json::to_value(&cfg).expect("config serializes");
    Ok((echoed, outputs))
}

/// Runs one subcommand and returns the files written, manifest last.
pub fn run(cli: &Cli) -> Result<Vec<FileRecord>, CliError> {
    let raw = std::fs::read(&cli.config).map_err(|e| CliError::Config(format!("{}: {e}", cli.config.display())))?;
    let text = String::from_utf8(raw.clone())
        .map_err(|_| CliError::Config(format!("{}: not UTF-8", cli.config.display())))?;
    let base = cli.config.parent().map(Path::to_path_buf).unwrap_or_default();

    let (echoed, outputs) = match cli.subcommand {
        Subcommand::Witness => execute(cli, &text, commands::witness)?,
        Subcommand::Scan => execute(cli, &text, commands::scan)?,
        Subcommand::Membership => execute(cli, &text, commands::membership)?,
        Subcommand::ModuleNorm => execute(cli, &text, commands::module_norm)?,
        Subcommand::Hardy => execute(cli, &text, |c| commands::hardy(c, &base))?,
        Subcommand::Oracle => execute(cli, &text, commands::oracle)?,
    };

    std::fs::create_dir_all(&cli.out).map_err(|e| io_err(&cli.out, e))?;
    let mut records = Vec::with_capacity(outputs.len() + 1);
    for (name, bytes) in &outputs {
        let path = cli.out.join(name);
        std::fs::write(&path, bytes).map_err(|e| io_err(&path, e))?;
        records.push(FileRecord {
            name: name.clone(),
            bytes: bytes.len(),
            sha256: sha256_hex(bytes),
        });
    }
    let manifest = json!({
        "tool": "hull-lab",
        "version": env!("CARGO_PKG_VERSION"),
        "core_version": hull_core::VERSION,
        "subcommand": cli.subcommand.name(),
        "config_sha256": sha256_hex(&raw),
        "config": echoed,
        "files": records,
    });
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    let path = cli.out.join("manifest.json");
    std::fs::write(&path, &text).map_err(|e| io_err(&path, e))?;
    records.push(FileRecord {
        name: "manifest.json".into(),
        bytes: text.len(),
        sha256: sha256_hex(text.as_bytes()),
    });
    Ok(records)
}

/// Parses `args` (program name first), runs, reports, and returns the exit code.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(records) => {
            for r in records {
                println!("{}  {}", r.sha256, cli.out.join(&r.name).display());
            }
            0
        }
        Err(e) => {
            eprintln!("hull-lab {}: {e}", cli.subcommand.name());
            e.exit_code()
        }
    }
}
