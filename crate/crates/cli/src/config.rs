//! Run configuration: a flat `key = value` file overridden by flags.
//!
//! Recognized keys:
//!
//! | key | meaning | default |
//! |---|---|---|
//! | `n` | sphere dimension | 3 |
//! | `R_minus_a` | cylinder half-length r | 3 |
//! | `grid_N` | nodes on [0, 2R], odd | 1025 |
//! | `epsilon` | ε for single-ε experiments | 0.2·r |
//! | `epsilon_schedule` | comma list, strictly decreasing | 0.4r, 0.2r, 0.1r |
//! | `experiment` | subcommand when none is given | |
//! | `out_dir` | output directory | `out` |
//! | `seed` | recorded; every experiment is deterministic | 0 |
//! | `dt` | flow step | ε²/4 |
//! | `t_end` | flow end time | experiment default |
//! | `snapshot_stride` | steps between trace rows | 100 |
//! | `theta_fraction` | Frankel perturbation size | 0.5 |
//! | `drift_offset` | starting layer offset | 0.3·r |
//! | `alpha_count` | shooting seeds | 400 |
//! | `tolerance` | Newton sup-residual | 1e−9 |
//!
//! `#` starts a comment. Values may be wrapped in double quotes.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub n: usize,
    #[serde(rename = "R_minus_a")]
    pub r: f64,
    #[serde(rename = "grid_N")]
    pub grid_n: usize,
    pub epsilon: f64,
    pub epsilon_schedule: Option<Vec<f64>>,
    pub experiment: Option<String>,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub snapshot_stride: usize,
    pub theta_fraction: f64,
    pub drift_offset: f64,
    pub alpha_count: usize,
    pub tolerance: f64,
}

/// Raw values before defaults that depend on r are filled in.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
}

const KEYS: [&str; 15] = [
    "n",
    "R_minus_a",
    "grid_N",
    "epsilon",
    "epsilon_schedule",
    "experiment",
    "out_dir",
    "seed",
    "dt",
    "t_end",
    "snapshot_stride",
    "theta_fraction",
    "drift_offset",
    "alpha_count",
    "tolerance",
];

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut raw = Self::default();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let parse_err = |message: String| CliError::Parse { line: line_no, message };
            let (key, value) = body.split_once('=').ok_or_else(|| parse_err(format!("expected key = value, got {body:?}")))?;
            let key = key.trim();
            let mut value = value.trim();
            if value.len() >= 2 && value.starts_with('"') && value.ends_with('"') {
                value = &value[1..value.len() - 1];
            }
            if !KEYS.contains(&key) {
                return Err(parse_err(format!("unknown key {key:?}")));
            }
            if raw.values.insert(key.to_string(), value.to_string()).is_some() {
                return Err(parse_err(format!("duplicate key {key:?}")));
            }
        }
        Ok(raw)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation { field: "config".into(), message: format!("{}: {e}", path.display()) })?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        debug_assert!(KEYS.contains(&key));
        self.values.insert(key.to_string(), value.into());
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.values
            .get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| CliError::Validation { field: key.into(), message: format!("cannot parse {v:?}") })
            })
            .transpose()
    }

    /// Applies defaults and checks the invariants.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let invalid = |field: &str, message: String| CliError::Validation { field: field.into(), message };
        let n = self.get("n")?.unwrap_or(3);
        let r: f64 = self.get("R_minus_a")?.unwrap_or(3.0);
        let grid_n = self.get("grid_N")?.unwrap_or(1025);
        let epsilon = self.get("epsilon")?.unwrap_or(r * 2.0 / 10.0);
        let epsilon_schedule = self.values.get("epsilon_schedule").map(|list| parse_schedule(list)).transpose()?;
        let cfg = RunConfig {
            n,
            r,
            grid_n,
            epsilon,
            epsilon_schedule,
            experiment: self.values.get("experiment").cloned(),
            out_dir: self.values.get("out_dir").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out")),
            seed: self.get("seed")?.unwrap_or(0),
            dt: self.get("dt")?,
            t_end: self.get("t_end")?,
            snapshot_stride: self.get("snapshot_stride")?.unwrap_or(100),
            theta_fraction: self.get("theta_fraction")?.unwrap_or(0.5),
            drift_offset: self.get("drift_offset")?.unwrap_or(r * 3.0 / 10.0),
            alpha_count: self.get("alpha_count")?.unwrap_or(400),
            tolerance: self.get("tolerance")?.unwrap_or(1e-9),
        };

        if !(3..=64).contains(&cfg.n) {
            return Err(invalid("n", format!("must lie in 3..=64, got {}", cfg.n)));
        }
        if !(cfg.r > 0.0) || !cfg.r.is_finite() {
            return Err(invalid("R_minus_a", format!("must be positive, got {}", cfg.r)));
        }
        if cfg.grid_n.is_multiple_of(2) {
            return Err(invalid("grid_N", format!("must be odd so a center node exists, got {}", cfg.grid_n)));
        }
        if cfg.grid_n < 17 {
            return Err(invalid("grid_N", format!("must be >= 17, got {}", cfg.grid_n)));
        }
        if !(cfg.epsilon > 0.0) || !cfg.epsilon.is_finite() {
            return Err(invalid("epsilon", format!("must be positive, got {}", cfg.epsilon)));
        }
        if cfg.dt.is_some_and(|dt| !(dt > 0.0)) {
            return Err(invalid("dt", "must be positive".into()));
        }
        if cfg.t_end.is_some_and(|t| !(t > 0.0)) {
            return Err(invalid("t_end", "must be positive".into()));
        }
        if cfg.snapshot_stride == 0 {
            return Err(invalid("snapshot_stride", "must be >= 1".into()));
        }
        if !(0.0..1.0).contains(&cfg.theta_fraction) {
            return Err(invalid("theta_fraction", format!("must lie in [0, 1), got {}", cfg.theta_fraction)));
        }
        if !(cfg.drift_offset.abs() < cfg.r) {
            return Err(invalid("drift_offset", format!("|offset| must be below r = {}", cfg.r)));
        }
        if cfg.alpha_count < 2 {
            return Err(invalid("alpha_count", "must be >= 2".into()));
        }
        if !(cfg.tolerance > 0.0) {
            return Err(invalid("tolerance", "must be positive".into()));
        }
        Ok(cfg)
    }
}

impl RunConfig {
    /// The configured schedule, or 0.4r, 0.2r, 0.1r.
    pub fn schedule_or_default(&self) -> Vec<f64> {
        self.epsilon_schedule.clone().unwrap_or_else(|| vec![self.r * 4.0 / 10.0, self.r * 2.0 / 10.0, self.r / 10.0])
    }

    /// The schedule when one was given, else the single ε.
    pub fn solve_epsilons(&self) -> Vec<f64> {
        self.epsilon_schedule.clone().unwrap_or_else(|| vec![self.epsilon])
    }
}

/// Comma-separated, positive, strictly decreasing.
pub fn parse_schedule(list: &str) -> Result<Vec<f64>, CliError> {
    let invalid = |message: String| CliError::Validation { field: "epsilon_schedule".into(), message };
    let values = list
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| invalid(format!("cannot parse {v:?}"))))
        .collect::<Result<Vec<f64>, CliError>>()?;
    if values.iter().any(|e| !(*e > 0.0)) {
        return Err(invalid("values must be positive".into()));
    }
    if values.windows(2).any(|p| p[1] >= p[0]) {
        return Err(invalid("values must be strictly decreasing".into()));
    }
    Ok(values)
}
