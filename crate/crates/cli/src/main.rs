//! `capcyl`: runs the experiments and writes CSV/JSON outputs plus a
//! `manifest.json` into the output directory.
//!
//! Exit status: 0 when every embedded check passes, 1 on an experiment
//! failure, 2 on a configuration error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod experiments;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde::Serialize;
use sha2::{Digest, Sha256};

use config::{RawConfig, RunConfig};
use experiments::{Check, Outcome, SUBCOMMANDS};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid {field}: {message}")]
    Validation { field: String, message: String },
    #[error("unknown subcommand {0:?}; expected one of {list} or all", list = SUBCOMMANDS.join(", "))]
    UnknownSubcommand(String),
    #[error("no subcommand given and no experiment in the config")]
    MissingSubcommand,
    #[error("writing {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "capcyl", version, about = "Allen-Cahn experiments on capped-cylinder spheres")]
struct Args {
    /// metric, curvature, cap-compare, solve, census, flow-frankel,
    /// flow-drift, spectrum, jacobi, width, example-cylinder or all
    subcommand: Option<String>,
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    /// Cylinder half-length r = R − a.
    #[arg(long)]
    r: Option<f64>,
    /// Grid nodes on [0, 2R]; must be odd.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    /// Comma-separated, strictly decreasing.
    #[arg(long, value_name = "LIST")]
    eps_schedule: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Serialize)]
struct FileEntry {
    name: String,
    bytes: usize,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct RunManifest<'a> {
    version: &'static str,
    subcommand: &'a str,
    config: &'a RunConfig,
    wall_time_s: f64,
    files: Vec<FileEntry>,
    checks: Vec<Check>,
    passed: bool,
}

fn load(args: &Args) -> Result<RunConfig, CliError> {
    let mut raw = match &args.config {
        Some(path) => RawConfig::load(path)?,
        None => RawConfig::default(),
    };
    if let Some(n) = args.n {
        raw.set("n", n.to_string());
    }
    if let Some(r) = args.r {
        raw.set("R_minus_a", r.to_string());
    }
    if let Some(grid) = args.grid {
        raw.set("grid_N", grid.to_string());
    }
    if let Some(eps) = args.eps {
        raw.set("epsilon", eps.to_string());
    }
    if let Some(list) = &args.eps_schedule {
        raw.set("epsilon_schedule", list.clone());
    }
    if let Some(seed) = args.seed {
        raw.set("seed", seed.to_string());
    }
    if let Some(out) = &args.out {
        raw.set("out_dir", out.display().to_string());
    }
    raw.resolve()
}

/// Runs the named subcommand; `all` dispatches every experiment on its own
/// thread and merges the results in a fixed order.
fn dispatch(name: &str, cfg: &RunConfig) -> Outcome {
    if name != "all" {
        return experiments::run(name, cfg);
    }
    let parts: Vec<Outcome> = std::thread::scope(|scope| {
        let handles: Vec<_> = SUBCOMMANDS.iter().map(|sub| scope.spawn(move || experiments::run(sub, cfg))).collect();
        handles.into_iter().map(|h| h.join().expect("experiment thread panicked")).collect()
    });
    let mut merged = Outcome::default();
    for part in parts {
        for (file, contents) in part.files {
            // metric and curvature both emit curvature.csv with identical contents
            if !merged.files.iter().any(|(f, _)| *f == file) {
                merged.files.push((file, contents));
            }
        }
        merged.checks.extend(part.checks);
    }
    merged
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|source| CliError::Io { path, source })
}

fn execute(args: &Args) -> Result<bool, CliError> {
    let cfg = load(args)?;
    let name = args.subcommand.clone().or_else(|| cfg.experiment.clone()).ok_or(CliError::MissingSubcommand)?;
    if name != "all" && !SUBCOMMANDS.contains(&name.as_str()) {
        return Err(CliError::UnknownSubcommand(name));
    }

    let start = Instant::now();
    let mut outcome = dispatch(&name, &cfg);
    let wall_time_s = start.elapsed().as_secs_f64();
    outcome.files.sort_by(|a, b| a.0.cmp(&b.0));

    let dir = &cfg.out_dir;
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.clone(), source })?;
    let mut files = Vec::with_capacity(outcome.files.len());
    for (file, contents) in &outcome.files {
        write(dir, file, contents)?;
        files.push(FileEntry { name: file.clone(), bytes: contents.len(), sha256: hex::encode(Sha256::digest(contents)) });
    }
    let passed = outcome.checks.iter().all(|c| c.passed);
    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION"),
        subcommand: &name,
        config: &cfg,
        wall_time_s,
        files,
        checks: outcome.checks,
        passed,
    };
    write(dir, "manifest.json", &capcyl::io::to_json(&manifest))?;

    for c in &manifest.checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        println!("{tag} {} measured {} required {}", c.name, c.measured, c.required);
    }
    for c in manifest.checks.iter().filter(|c| !c.passed) {
        eprintln!("experiment failed: check {} measured {} required {}", c.name, c.measured, c.required);
    }
    println!("wrote {} files to {}", manifest.files.len() + 1, dir.display());
    Ok(passed)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
