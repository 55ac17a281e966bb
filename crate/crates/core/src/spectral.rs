//! Spectra of the linearized Allen-Cahn operator by spherical-harmonic mode,
//! and of the Jacobi operator of the coordinate slices.
//!
//! Around a radial profile u the operator −Δ + W″(u)/ε² separates: on the
//! degree-k harmonics of Sⁿ⁻¹ (eigenvalue μ_k = k(k+n−2), multiplicity d_k)
//! its radial factor is
//!
//! ```text
//! −L_k ψ = −ψ″ − (n−1)(w′/w)ψ′ + μ_k ψ/w² + W″(u)ψ/ε².
//! ```
//!
//! Each mode is discretized with the same flux form as the residual, which is
//! self-adjoint for the weights mᵢ; conjugating by diag(√mᵢ) gives a symmetric
//! tridiagonal matrix whose lowest eigenvalues come from Sturm bisection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::RadialProfile;
use crate::geometry::SphereMetric;
use crate::tridiag::SymTridiagonal;

/// μ_k = k(k + n − 2), the degree-k eigenvalue of the round Sⁿ⁻¹.
pub fn harmonic_eigenvalue(dim: usize, k: usize) -> f64 {
    (k * (k + dim - 2)) as f64
}

/// Dimension of the degree-k spherical harmonics on Sⁿ⁻¹:
/// C(k+n−3, k)·(2k+n−2)/(n−2).
pub fn harmonic_multiplicity(dim: usize, k: usize) -> usize {
    if k == 0 {
        return 1;
    }
    let m = dim - 2; // Sⁿ⁻¹ = S^{m+1}
    // C(k + m − 1, k) computed exactly
    let mut binom: u128 = 1;
    for j in 1..=k as u128 {
        binom = binom * (m as u128 - 1 + j) / j;
    }
    (binom * (2 * k + m) as u128 / m as u128) as usize
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSpectrum {
    pub k: usize,
    pub mu_k: f64,
    pub d_k: usize,
    pub eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub epsilon: f64,
    pub null_tolerance: f64,
    pub modes: Vec<ModeSpectrum>,
    pub index: usize,
    pub nullity: usize,
    /// Lowest eigenvalue of the top mode when it does not clear the null band.
    pub truncation: Option<f64>,
}

impl SpectralReport {
    pub fn mode(&self, k: usize) -> Option<&ModeSpectrum> {
        self.modes.get(k)
    }

    pub fn lowest(&self, k: usize) -> Option<f64> {
        self.modes.get(k).and_then(|m| m.eigenvalues.first().copied())
    }

    /// Fails with `ModeTruncation` when the top mode could still contribute
    /// to index or nullity.
    pub fn certify(&self) -> Result<()> {
        match self.truncation {
            Some(lambda) => Err(Error::ModeTruncation { k_max: self.modes.len() - 1, lambda }),
            None => Ok(()),
        }
    }

    /// Number of (mode, eigenvalue) pairs strictly below −null_tolerance,
    /// without harmonic multiplicity.
    pub fn negative_count(&self) -> usize {
        self.modes.iter().map(|m| m.eigenvalues.iter().filter(|l| **l <= -self.null_tolerance).count()).sum()
    }
}

/// Zero band used for nullity: |λ| < 1e−6·ε⁻².
pub fn null_tolerance(epsilon: f64) -> f64 {
    1e-6 / (epsilon * epsilon)
}

/// Symmetrized matrix of −L_k. Mode 0 keeps the pole nodes (Neumann);
/// higher modes vanish there and use the interior nodes only.
pub fn mode_matrix(u: &RadialProfile, k: usize) -> SymTridiagonal {
    let metric = &u.metric;
    let nodes = metric.nodes();
    let last = nodes - 1;
    let inv_eps2 = 1.0 / (u.epsilon * u.epsilon);
    let mu = harmonic_eigenvalue(metric.dim, k);
    let range = if k == 0 { 0..nodes } else { 1..last };

    let mut diag = Vec::with_capacity(range.len());
    let mut off = Vec::with_capacity(range.len().saturating_sub(1));
    for i in range.clone() {
        let m = metric.mass[i];
        let mut d = 0.0;
        if i < last {
            d += metric.conductance[i];
        }
        if i > 0 {
            d += metric.conductance[i - 1];
        }
        let mut value = d / m + u.well.second_derivative(u.values[i]) * inv_eps2;
        if k > 0 {
            value += mu / (metric.w[i] * metric.w[i]);
        }
        diag.push(value);
        if i + 1 < range.end {
            off.push(-metric.conductance[i] / (m * metric.mass[i + 1]).sqrt());
        }
    }
    SymTridiagonal::new(diag, off)
}

/// Lowest `m` eigenvalues of −L_k for k = 0..=k_max with index and nullity
/// totals weighted by harmonic multiplicity.
pub fn linearized_spectrum(u: &RadialProfile, k_max: usize, m: usize) -> Result<SpectralReport> {
    if k_max < 1 {
        return Err(Error::InvalidOptions(format!("k_max must be >= 1, got {k_max}")));
    }
    if m < 2 {
        return Err(Error::InvalidOptions(format!("need at least 2 eigenvalues per mode, got {m}")));
    }
    let dim = u.metric.dim;
    let tol = null_tolerance(u.epsilon);
    let modes: Vec<ModeSpectrum> = (0..=k_max)
        .map(|k| ModeSpectrum {
            k,
            mu_k: harmonic_eigenvalue(dim, k),
            d_k: harmonic_multiplicity(dim, k),
            eigenvalues: mode_matrix(u, k).lowest_eigenvalues(m),
        })
        .collect();

    let mut index = 0;
    let mut nullity = 0;
    for mode in &modes {
        index += mode.d_k * mode.eigenvalues.iter().filter(|l| **l <= -tol).count();
        nullity += mode.d_k * mode.eigenvalues.iter().filter(|l| l.abs() < tol).count();
    }
    let top = modes.last().and_then(|md| md.eigenvalues.first().copied()).unwrap_or(f64::INFINITY);
    let truncation = (top < tol).then_some(top);
    Ok(SpectralReport { epsilon: u.epsilon, null_tolerance: tol, modes, index, nullity, truncation })
}

/// Radial factor of the `which`-th eigenfunction of mode `k`, normalized to
/// sup-norm 1 and oriented so its largest-magnitude entry is positive.
pub fn eigenfunction(u: &RadialProfile, report: &SpectralReport, k: usize, which: usize) -> Result<RadialProfile> {
    let lambda = report
        .modes
        .get(k)
        .and_then(|mode| mode.eigenvalues.get(which).copied())
        .ok_or(Error::NotComputed { k, which })?;
    let matrix = mode_matrix(u, k);
    let y = matrix.eigenvector(lambda)?;
    let metric = &u.metric;
    let offset = usize::from(k > 0);
    let mut psi = vec![0.0; metric.nodes()];
    for (j, yj) in y.iter().enumerate() {
        psi[j + offset] = yj / metric.mass[j + offset].sqrt();
    }
    let peak = psi.iter().copied().fold(0.0_f64, |acc, v| if v.abs() > acc.abs() { v } else { acc });
    if peak != 0.0 {
        psi.iter_mut().for_each(|v| *v /= peak);
    }
    Ok(u.with_values(psi))
}

/// ⟨f, g⟩ = Σ mᵢ fᵢ gᵢ (per unit slice volume).
pub fn weighted_inner(metric: &SphereMetric, f: &[f64], g: &[f64]) -> f64 {
    f.iter().zip(g).zip(&metric.mass).map(|((a, b), m)| a * b * m).sum()
}

/// Rayleigh quotient ⟨ψ, −L_k ψ⟩/⟨ψ, ψ⟩ in the symmetrized coordinates.
pub fn rayleigh_quotient(u: &RadialProfile, k: usize, psi: &[f64]) -> f64 {
    let metric = &u.metric;
    let offset = usize::from(k > 0);
    let matrix = mode_matrix(u, k);
    let y: Vec<f64> = (0..matrix.len()).map(|j| psi[j + offset] * metric.mass[j + offset].sqrt()).collect();
    let ay = matrix.apply(&y);
    let num: f64 = y.iter().zip(&ay).map(|(a, b)| a * b).sum();
    let den: f64 = y.iter().map(|a| a * a).sum();
    num / den
}

/// Mode-1 lowest eigenvalue of the linearization. For a radial profile the
/// Killing-field derivatives ⟨∇u, X⟩ vanish identically, so a rotational
/// kernel can only show up as a zero in this mode; a positive value certifies
/// there is none.
pub fn rotational_kernel_check(u: &RadialProfile) -> f64 {
    mode_matrix(u, 1).lowest_eigenvalues(1)[0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobiLevel {
    pub k: usize,
    pub eigenvalue: f64,
    pub multiplicity: usize,
}

/// Spectrum of the Jacobi operator of a plateau slice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobiReport {
    pub s: f64,
    pub levels: Vec<JacobiLevel>,
    pub index: usize,
    pub nullity: usize,
}

/// On the plateau the slices are totally geodesic and Ric(N, N) = 0, so the
/// Jacobi operator is the Laplacian of the round Sⁿ⁻¹ of radius w(s) = 1:
/// eigenvalues μ_k/w² with multiplicity d_k.
pub fn jacobi_spectrum_slice(metric: &SphereMetric, s: f64, k_max: usize) -> Result<JacobiReport> {
    let (w, w_prime, _) = metric.warp_eval(s)?;
    let (lo, hi) = metric.plateau();
    if w_prime != 0.0 || s < lo || s > hi {
        return Err(Error::NotMinimal { s, w_prime });
    }
    let levels: Vec<JacobiLevel> = (0..=k_max)
        .map(|k| JacobiLevel {
            k,
            eigenvalue: harmonic_eigenvalue(metric.dim, k) / (w * w),
            multiplicity: harmonic_multiplicity(metric.dim, k),
        })
        .collect();
    let index = levels.iter().filter(|l| l.eigenvalue < 0.0).map(|l| l.multiplicity).sum();
    let nullity = levels.iter().filter(|l| l.eigenvalue == 0.0).map(|l| l.multiplicity).sum();
    Ok(JacobiReport { s, levels, index, nullity })
}
