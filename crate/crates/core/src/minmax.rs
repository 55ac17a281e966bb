//! Canonical sweepout by coordinate slices and the width comparisons built
//! on it.
//!
//! The slices Σ_t = {t} × Sⁿ⁻¹ sweep out the sphere with mass
//! w(t)ⁿ⁻¹·vol(Sⁿ⁻¹). Since w ≤ 1 with equality exactly on the plateau, the
//! largest slice mass is vol(Sⁿ⁻¹) and every plateau slice attains it.

use serde::{Deserialize, Serialize};

use crate::elliptic::SolutionRecord;
use crate::error::{Error, Result};
use crate::field::{sigma_energy, DoubleWell};
use crate::geometry::{slice_area, SphereMetric};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepoutProfile {
    pub t: Vec<f64>,
    pub mass: Vec<f64>,
    pub max_mass: f64,
    /// First and last sample attaining the maximum.
    pub argmax: (f64, f64),
}

/// Slice masses at `samples` equispaced points of [0, L].
///
/// The argmax is read from the warp deficit rather than from the mass, which
/// rounds to the maximum a little before the plateau starts.
pub fn sweepout_profile(metric: &SphereMetric, samples: usize) -> Result<SweepoutProfile> {
    if samples < 64 {
        return Err(Error::InvalidOptions(format!("need at least 64 samples, got {samples}")));
    }
    let length = metric.total_length();
    let step = length / (samples - 1) as f64;
    let t: Vec<f64> = (0..samples).map(|i| if i + 1 == samples { length } else { i as f64 * step }).collect();
    let mass = t.iter().map(|&s| slice_area(metric, s)).collect::<Result<Vec<f64>>>()?;
    let max_mass = mass.iter().copied().fold(0.0, f64::max);

    let flat: Vec<f64> = t.iter().copied().filter(|&s| metric.warp_deficit(s) == 0.0).collect();
    let argmax = match (flat.first(), flat.last()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        // no sample landed on a degenerate plateau; fall back to the mass
        _ => {
            let i = mass.iter().enumerate().fold(0, |best, (i, m)| if *m > mass[best] { i } else { best });
            (t[i], t[i])
        }
    };
    Ok(SweepoutProfile { t, mass, max_mass, argmax })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyRow {
    pub eps: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    /// E_ε / (2σ·ω₁).
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidthReport {
    pub omega1_upper: f64,
    pub plateau: (f64, f64),
    pub energy_table: Vec<EnergyRow>,
    /// |ratio − 1| strictly decreasing as ε decreases.
    pub converging: bool,
}

/// Compares solution energies with the sweepout bound. Rows are sorted by
/// decreasing ε.
pub fn width_report(metric: &SphereMetric, well: &DoubleWell, energies: &[(f64, f64)]) -> Result<WidthReport> {
    if energies.len() < 3 {
        return Err(Error::InsufficientData(energies.len()));
    }
    let omega1_upper = metric.slice_unit_volume();
    let sigma = sigma_energy(well);
    let mut energy_table: Vec<EnergyRow> = energies
        .iter()
        .map(|&(eps, energy)| EnergyRow { eps, energy, ratio: energy / (2.0 * sigma * omega1_upper) })
        .collect();
    energy_table.sort_by(|x, y| y.eps.total_cmp(&x.eps));
    let converging = energy_table.windows(2).all(|p| (p[1].ratio - 1.0).abs() < (p[0].ratio - 1.0).abs());
    Ok(WidthReport { omega1_upper, plateau: metric.plateau(), energy_table, converging })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterfaceEntry {
    pub alpha_seed: Option<f64>,
    pub zeros: Vec<f64>,
    pub interface_area: f64,
    pub energy: f64,
    /// E ≥ 0.9·2σ·(least slice mass among the zeros).
    pub energy_bound_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeastAreaReport {
    pub reference_area: f64,
    pub tolerance: f64,
    pub entries: Vec<InterfaceEntry>,
    /// Constant members, which carry no interface.
    pub excluded: usize,
    pub min_area: Option<f64>,
    pub any_below: bool,
    /// Largest distance from the center among single-zero members.
    pub max_single_layer_offset: Option<f64>,
}

/// Interface areas of the nonconstant census members, counting each zero
/// once, against the central slice.
pub fn least_area_scan(census: &[SolutionRecord], metric: &SphereMetric) -> Result<LeastAreaReport> {
    if census.is_empty() {
        return Err(Error::InsufficientData(0));
    }
    let reference_area = slice_area(metric, metric.center())?;
    let tolerance = 1e-9 * reference_area;
    let mut entries = Vec::new();
    let mut excluded = 0;
    for record in census {
        let zeros = record.zeros();
        if record.is_constant() || zeros.is_empty() {
            excluded += 1;
            continue;
        }
        let areas = zeros.iter().map(|&z| slice_area(metric, z)).collect::<Result<Vec<f64>>>()?;
        let least = areas.iter().copied().fold(f64::INFINITY, f64::min);
        let sigma = sigma_energy(&record.profile.well);
        entries.push(InterfaceEntry {
            alpha_seed: record.alpha_seed,
            interface_area: areas.iter().sum(),
            energy: record.energy,
            energy_bound_ok: record.energy >= 0.9 * 2.0 * sigma * least,
            zeros,
        });
    }
    let min_area = entries.iter().map(|e| e.interface_area).reduce(f64::min);
    let any_below = entries.iter().any(|e| e.interface_area < reference_area - tolerance);
    let center = metric.center();
    let max_single_layer_offset = entries
        .iter()
        .filter(|e| e.zeros.len() == 1)
        .map(|e| (e.zeros[0] - center).abs())
        .reduce(f64::max);
    Ok(LeastAreaReport { reference_area, tolerance, entries, excluded, min_area, any_below, max_single_layer_offset })
}
