//! Text serializations of the experiment outputs.
//!
//! CSV numbers carry 17 significant digits so every double round-trips.
//! Lines starting with `#` hold run metadata as `key=value` pairs. JSON goes
//! through serde_json, whose shortest-representation floats also round-trip.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::cylinder::CriticalPoint;
use crate::elliptic::{Provenance, SolutionRecord};
use crate::field::RadialProfile;
use crate::geometry::{CapComparison, CurvatureReport, SphereMetric};
use crate::minmax::{SweepoutProfile, WidthReport};
use crate::parabolic::FlowTrace;
use crate::spectral::{ModeSpectrum, SpectralReport};

/// `{:.16e}`; non-finite values as `nan`, `inf`, `-inf`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

/// Minimal CSV builder: metadata comments, a header, then rows.
#[derive(Debug, Default)]
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(meta: &[(&str, String)], header: &[&str]) -> Self {
        let mut text = String::new();
        for (k, v) in meta {
            let _ = writeln!(text, "# {k}={v}");
        }
        text.push_str(&header.join(","));
        text.push('\n');
        Self { text }
    }

    pub fn row<I: IntoIterator<Item = String>>(&mut self, cells: I) {
        let line: Vec<String> = cells.into_iter().collect();
        self.text.push_str(&line.join(","));
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}

fn metric_meta(metric: &SphereMetric) -> Vec<(&'static str, String)> {
    vec![
        ("n", metric.dim.to_string()),
        ("R", fmt_num(metric.half_length)),
        ("N", metric.nodes().to_string()),
        ("a", fmt_num(metric.a())),
    ]
}

/// Columns s, w, w_prime, w_second.
pub fn warp_csv(metric: &SphereMetric) -> String {
    let mut csv = Csv::new(&metric_meta(metric), &["s", "w", "w_prime", "w_second"]);
    for (i, s) in metric.coords().into_iter().enumerate() {
        csv.row([fmt_num(s), fmt_num(metric.w[i]), fmt_num(metric.w_prime[i]), fmt_num(metric.w_second[i])]);
    }
    csv.finish()
}

/// Columns s, w, w_prime, w_second, ricci_radial, ricci_tangential, scalar.
pub fn curvature_csv(metric: &SphereMetric, report: &CurvatureReport) -> String {
    let header = ["s", "w", "w_prime", "w_second", "ricci_radial", "ricci_tangential", "scalar"];
    let mut csv = Csv::new(&metric_meta(metric), &header);
    for i in 0..report.s.len() {
        csv.row([
            fmt_num(report.s[i]),
            fmt_num(metric.w[i]),
            fmt_num(metric.w_prime[i]),
            fmt_num(metric.w_second[i]),
            fmt_num(report.ricci_radial[i]),
            fmt_num(report.ricci_tangential[i]),
            fmt_num(report.scalar[i]),
        ]);
    }
    csv.finish()
}

/// Columns b, f, f_prime.
pub fn cap_csv(report: &CapComparison) -> String {
    let mut csv = Csv::new(&[("min_f", fmt_num(report.min_f)), ("f_end", fmt_num(report.f_end))], &["b", "f", "f_prime"]);
    for i in 0..report.b.len() {
        csv.row([fmt_num(report.b[i]), fmt_num(report.f[i]), fmt_num(report.f_prime[i])]);
    }
    csv.finish()
}

/// Columns s, u.
pub fn profile_csv(profile: &RadialProfile) -> String {
    let mut meta = metric_meta(&profile.metric);
    meta.push(("epsilon", fmt_num(profile.epsilon)));
    meta.push(("well", profile.well.name().to_string()));
    let mut csv = Csv::new(&meta, &["s", "u"]);
    for (s, u) in profile.metric.coords().into_iter().zip(&profile.values) {
        csv.row([fmt_num(s), fmt_num(*u)]);
    }
    csv.finish()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusEntry {
    pub alpha_seed: Option<f64>,
    pub energy: f64,
    pub residual_norm: f64,
    pub zeros: Vec<f64>,
    pub provenance: Provenance,
}

impl From<&SolutionRecord> for CensusEntry {
    fn from(r: &SolutionRecord) -> Self {
        Self {
            alpha_seed: r.alpha_seed,
            energy: r.energy,
            residual_norm: r.residual_norm,
            zeros: r.zeros(),
            provenance: r.provenance,
        }
    }
}

/// Array of {alpha_seed, energy, residual_norm, zeros, provenance}.
pub fn census_json(members: &[SolutionRecord]) -> String {
    let entries: Vec<CensusEntry> = members.iter().map(CensusEntry::from).collect();
    to_json(&entries)
}

/// Columns t, interface_s, energy, min_step_increment; interface_s is empty
/// when the profile has no zero.
pub fn flow_trace_csv(trace: &FlowTrace, meta: &[(&str, String)]) -> String {
    let mut csv = Csv::new(meta, &["t", "interface_s", "energy", "min_step_increment"]);
    for i in 0..trace.times.len() {
        csv.row([
            fmt_num(trace.times[i]),
            fmt_opt(trace.interface[i]),
            fmt_num(trace.energy[i]),
            fmt_num(trace.min_step_increment[i]),
        ]);
    }
    csv.finish()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralJson {
    pub epsilon: f64,
    pub modes: Vec<ModeSpectrum>,
    pub index: usize,
    pub nullity: usize,
}

/// {epsilon, modes: [{k, mu_k, d_k, eigenvalues}], index, nullity}.
pub fn spectral_json(report: &SpectralReport) -> String {
    to_json(&SpectralJson {
        epsilon: report.epsilon,
        modes: report.modes.clone(),
        index: report.index,
        nullity: report.nullity,
    })
}

/// Columns t, mass.
pub fn sweepout_csv(profile: &SweepoutProfile) -> String {
    let meta = [
        ("max_mass", fmt_num(profile.max_mass)),
        ("argmax_lo", fmt_num(profile.argmax.0)),
        ("argmax_hi", fmt_num(profile.argmax.1)),
    ];
    let mut csv = Csv::new(&meta, &["t", "mass"]);
    for (t, m) in profile.t.iter().zip(&profile.mass) {
        csv.row([fmt_num(*t), fmt_num(*m)]);
    }
    csv.finish()
}

/// {omega1_upper, plateau: [lo, hi], energy_table: [{eps, E, ratio}], converging}.
pub fn width_json(report: &WidthReport) -> String {
    to_json(report)
}

/// Columns t_star, f_second, nondegenerate, sin_value.
pub fn cylinder_csv(points: &[CriticalPoint]) -> String {
    let mut csv = Csv::new(&[], &["t_star", "f_second", "nondegenerate", "sin_value"]);
    for p in points {
        csv.row([fmt_num(p.t_star), fmt_num(p.f_second), p.nondegenerate.to_string(), fmt_num(p.sin_value)]);
    }
    csv.finish()
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data always serializes");
    s.push('\n');
    s
}

/// Metadata pairs, header, numeric rows.
pub type ParsedCsv = (Vec<(String, String)>, Vec<String>, Vec<Vec<f64>>);

/// Parses a CSV produced here into its metadata and numeric columns. Empty
/// cells read as NaN; `true`/`false` as 1/0.
pub fn parse_csv(text: &str) -> Option<ParsedCsv> {
    let mut meta = Vec::new();
    let mut header = None;
    let mut rows = Vec::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("# ") {
            let (k, v) = rest.split_once('=')?;
            meta.push((k.to_string(), v.to_string()));
        } else if header.is_none() {
            header = Some(line.split(',').map(str::to_string).collect::<Vec<_>>());
        } else {
            let row = line
                .split(',')
                .map(|c| match c {
                    "" => Some(f64::NAN),
                    "true" => Some(1.0),
                    "false" => Some(0.0),
                    _ => c.parse().ok(),
                })
                .collect::<Option<Vec<f64>>>()?;
            rows.push(row);
        }
    }
    Some((meta, header?, rows))
}
