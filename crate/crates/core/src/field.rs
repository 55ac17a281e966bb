//! Double-well potentials and rotationally symmetric profiles on the capped
//! sphere: the Allen-Cahn residual, the discrete energy, reflection across
//! the middle slice and nodal decompositions.
//!
//! The radial Laplacian is discretized in flux form,
//!
//! ```text
//! (Δₕu)ᵢ = [c_{i+1/2}(u_{i+1} − uᵢ) − c_{i−1/2}(uᵢ − u_{i−1})] / mᵢ
//! ```
//!
//! with conductances c = w_{i+1/2}ⁿ⁻¹/h and control volumes mᵢ = wᵢⁿ⁻¹h.
//! This is a centered second-order rendering of u″ + (n−1)(w′/w)u′, and it
//! makes the residual exactly the (weighted) gradient of the discrete energy.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::SphereMetric;
use crate::quad::adaptive_simpson;

/// Symmetric, nonnegative potentials with wells at ±1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WellKind {
    /// (1 − u²)²/4.
    Quartic,
    /// (1 + cos πu)/π².
    Cosine,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubleWell {
    pub kind: WellKind,
    /// Overall multiplier of W.
    pub scale: f64,
}

impl Default for DoubleWell {
    fn default() -> Self {
        Self::quartic()
    }
}

impl DoubleWell {
    pub fn quartic() -> Self {
        Self { kind: WellKind::Quartic, scale: 1.0 }
    }

    pub fn cosine() -> Self {
        Self { kind: WellKind::Cosine, scale: 1.0 }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Self { scale: self.scale * factor, ..self }
    }

    pub fn value(&self, u: f64) -> f64 {
        self.scale
            * match self.kind {
                WellKind::Quartic => {
                    let t = 1.0 - u * u;
                    0.25 * t * t
                }
                WellKind::Cosine => (1.0 + (std::f64::consts::PI * u).cos()) / (std::f64::consts::PI.powi(2)),
            }
    }

    pub fn derivative(&self, u: f64) -> f64 {
        self.scale
            * match self.kind {
                WellKind::Quartic => u * u * u - u,
                WellKind::Cosine => -(std::f64::consts::PI * u).sin() / std::f64::consts::PI,
            }
    }

    pub fn second_derivative(&self, u: f64) -> f64 {
        self.scale
            * match self.kind {
                WellKind::Quartic => 3.0 * u * u - 1.0,
                WellKind::Cosine => -(std::f64::consts::PI * u).cos(),
            }
    }

    /// C with |W′(t) − W′(s) − W″(s)(t − s)| ≤ C(t − s)² on [−1, 1]
    /// (half the sup of |W‴| there).
    pub fn remainder_constant(&self) -> f64 {
        self.scale
            * match self.kind {
                WellKind::Quartic => 3.0,
                WellKind::Cosine => 0.5 * std::f64::consts::PI,
            }
    }

    /// sup of W″ over [−1, 1].
    pub fn max_curvature(&self) -> f64 {
        self.scale
            * match self.kind {
                WellKind::Quartic => 2.0,
                WellKind::Cosine => 1.0,
            }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            WellKind::Quartic => "quartic",
            WellKind::Cosine => "cosine",
        }
    }
}

/// σ = ∫₋₁¹ √(W/2).
pub fn sigma_energy(well: &DoubleWell) -> f64 {
    adaptive_simpson(|t| (0.5 * well.value(t)).max(0.0).sqrt(), -1.0, 1.0, 1e-12)
}

/// The 1D layer tanh(t/(√2 ε)), solving u″ = W′(u)/ε² for the quartic well.
pub fn heteroclinic(t: f64, epsilon: f64, well: &DoubleWell) -> Result<f64> {
    heteroclinic_jet(t, epsilon, well).map(|(u, _, _)| u)
}

/// Heteroclinic value with its first two derivatives.
pub fn heteroclinic_jet(t: f64, epsilon: f64, well: &DoubleWell) -> Result<(f64, f64, f64)> {
    if well.kind != WellKind::Quartic {
        return Err(Error::UnsupportedWell);
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidOptions(format!("epsilon must be positive, got {epsilon}")));
    }
    let k = well.scale.sqrt() / (std::f64::consts::SQRT_2 * epsilon);
    let u = (k * t).tanh();
    let sech2 = 1.0 - u * u;
    Ok((u, k * sech2, -2.0 * k * k * u * sech2))
}

/// A rotationally symmetric function sampled at the metric's nodes.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    pub metric: Arc<SphereMetric>,
    pub epsilon: f64,
    pub well: DoubleWell,
    pub values: Vec<f64>,
}

impl RadialProfile {
    pub fn new(metric: Arc<SphereMetric>, epsilon: f64, well: DoubleWell, values: Vec<f64>) -> Result<Self> {
        if values.len() != metric.nodes() {
            return Err(Error::Dimension(format!("{} values for {} nodes", values.len(), metric.nodes())));
        }
        if !(epsilon > 0.0) {
            return Err(Error::InvalidOptions(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(Self { metric, epsilon, well, values })
    }

    pub fn constant(metric: Arc<SphereMetric>, epsilon: f64, well: DoubleWell, value: f64) -> Result<Self> {
        let n = metric.nodes();
        Self::new(metric, epsilon, well, vec![value; n])
    }

    /// Samples `f(s)` at every node.
    pub fn from_fn(metric: Arc<SphereMetric>, epsilon: f64, well: DoubleWell, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = metric.coords().into_iter().map(f).collect();
        Self::new(metric, epsilon, well, values)
    }

    /// Quartic layer tanh((s_c + offset − s)/(√2ε)): positive near s = 0.
    pub fn layer(metric: Arc<SphereMetric>, epsilon: f64, well: DoubleWell, offset: f64) -> Result<Self> {
        let center = metric.center() + offset;
        let mut values = Vec::with_capacity(metric.nodes());
        for s in metric.coords() {
            values.push(heteroclinic(center - s, epsilon, &well)?);
        }
        Self::new(metric, epsilon, well, values)
    }

    pub fn with_values(&self, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self { values, ..self.clone() }
    }

    pub fn negated(&self) -> Self {
        self.with_values(self.values.iter().map(|v| -v).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sup_distance(&self, other: &RadialProfile) -> f64 {
        sup_distance(&self.values, &other.values)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub fn sup_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// (Δₕu)ᵢ at one node. Missing neighbours (poles) contribute no flux.
#[inline]
pub(crate) fn laplacian_at(metric: &SphereMetric, u: &[f64], i: usize) -> f64 {
    let last = u.len() - 1;
    let mut flux = 0.0;
    if i < last {
        flux += metric.conductance[i] * (u[i + 1] - u[i]);
    }
    if i > 0 {
        flux -= metric.conductance[i - 1] * (u[i] - u[i - 1]);
    }
    flux / metric.mass[i]
}

/// Δₕu at every node.
pub fn laplacian(metric: &SphereMetric, u: &[f64]) -> Vec<f64> {
    (0..u.len()).map(|i| laplacian_at(metric, u, i)).collect()
}

/// rᵢ = (Δₕu)ᵢ − W′(uᵢ)/ε². At the poles the flux form reduces to
/// Δu = n·u″ with the Neumann ghost u₋₁ = u₁.
pub fn ac_residual(u: &RadialProfile) -> Vec<f64> {
    residual_values(&u.metric, u.epsilon, &u.well, &u.values)
}

pub(crate) fn residual_values(metric: &SphereMetric, epsilon: f64, well: &DoubleWell, u: &[f64]) -> Vec<f64> {
    let inv_eps2 = 1.0 / (epsilon * epsilon);
    (0..u.len()).map(|i| laplacian_at(metric, u, i) - well.derivative(u[i]) * inv_eps2).collect()
}

/// E_ε(u) = vol(Sⁿ⁻¹)[ε/2 Σ c_{i+1/2}(u_{i+1} − uᵢ)² + ε⁻¹ Σ mᵢ W(uᵢ)].
pub fn energy(u: &RadialProfile) -> f64 {
    energy_values(&u.metric, u.epsilon, &u.well, &u.values)
}

pub(crate) fn energy_values(metric: &SphereMetric, epsilon: f64, well: &DoubleWell, u: &[f64]) -> f64 {
    let gradient: f64 = u.windows(2).zip(&metric.conductance).map(|(pair, c)| c * (pair[1] - pair[0]).powi(2)).sum();
    let potential: f64 = u.iter().zip(&metric.mass).map(|(v, m)| m * well.value(*v)).sum();
    metric.slice_unit_volume() * (0.5 * epsilon * gradient + potential / epsilon)
}

/// ∂E/∂uᵢ, which equals −ε·vol(Sⁿ⁻¹)·mᵢ·rᵢ.
pub fn energy_gradient(u: &RadialProfile) -> Vec<f64> {
    let metric = &u.metric;
    let vol = metric.slice_unit_volume();
    let last = u.len() - 1;
    (0..u.len())
        .map(|i| {
            let mut g = 0.0;
            if i < last {
                g -= metric.conductance[i] * (u.values[i + 1] - u.values[i]);
            }
            if i > 0 {
                g += metric.conductance[i - 1] * (u.values[i] - u.values[i - 1]);
            }
            vol * (u.epsilon * g + metric.mass[i] * u.well.derivative(u.values[i]) / u.epsilon)
        })
        .collect()
}

/// s ↦ u(2R − s).
pub fn reflect(u: &RadialProfile) -> Result<RadialProfile> {
    if u.metric.nodes().is_multiple_of(2) {
        return Err(Error::AsymmetricGrid(u.metric.nodes()));
    }
    Ok(u.with_values(u.values.iter().rev().copied().collect()))
}

/// −u(2R − s): the reflection that maps solutions to solutions and fixes v_ε.
pub fn odd_reflect(u: &RadialProfile) -> Result<RadialProfile> {
    Ok(reflect(u)?.negated())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignInterval {
    pub left: f64,
    pub right: f64,
    pub sign: Sign,
}

/// Maximal sign intervals of a profile, partitioning [0, L].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodalDecomposition {
    pub intervals: Vec<SignInterval>,
}

impl NodalDecomposition {
    /// Interface locations: the boundaries between adjacent intervals.
    pub fn zeros(&self) -> Vec<f64> {
        self.intervals.iter().skip(1).map(|iv| iv.left).collect()
    }
}

pub const NODAL_TOL: f64 = 1e-10;

/// Splits [0, L] into sign intervals of `u`, ignoring nodes with |u| ≤ tol.
/// A sign change between significant nodes i < j is placed by linear
/// interpolation between them.
pub fn nodal_decomposition(u: &RadialProfile, tol: f64) -> Result<NodalDecomposition> {
    if !(tol >= 0.0) {
        return Err(Error::InvalidOptions(format!("nodal tolerance must be >= 0, got {tol}")));
    }
    let coords = u.metric.coords();
    let significant: Vec<(usize, Sign)> = u
        .values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > tol)
        .map(|(i, v)| (i, if *v > 0.0 { Sign::Positive } else { Sign::Negative }))
        .collect();
    let Some(&(_, first_sign)) = significant.first() else {
        return Err(Error::AllZero { tol });
    };

    let mut intervals = Vec::new();
    let mut left = 0.0;
    let mut sign = first_sign;
    for pair in significant.windows(2) {
        let (i, si) = pair[0];
        let (j, sj) = pair[1];
        if si == sj {
            continue;
        }
        let (ui, uj) = (u.values[i], u.values[j]);
        let zero = coords[i] + (coords[j] - coords[i]) * ui / (ui - uj);
        intervals.push(SignInterval { left, right: zero, sign });
        left = zero;
        sign = sj;
    }
    intervals.push(SignInterval { left, right: u.metric.total_length(), sign });
    Ok(NodalDecomposition { intervals })
}
