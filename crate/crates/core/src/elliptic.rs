//! Steady solutions of Δu − W′(u)/ε² = 0 in the radial reduction.
//!
//! The symmetric solution v_ε is built the way the existence argument goes:
//! minimize the energy on the half sphere [0, s_c] with u(s_c) = 0 (the
//! nonnegative Brezis–Oswald minimizer), then extend by odd reflection across
//! the middle slice. Newton's method on the flux-form residual polishes every
//! candidate, and a shooting scan from the pole collects a census of the
//! radial solutions it can reach.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{
    energy, energy_values, laplacian_at, nodal_decomposition, residual_values, sup_distance, sup_norm, DoubleWell,
    NodalDecomposition, RadialProfile, NODAL_TOL,
};
use crate::geometry::SphereMetric;
use crate::tridiag::Tridiagonal;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Sup-norm residual at which Newton stops.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Backtracking halvings allowed per Newton step.
    pub max_halvings: usize,
    /// Projected semi-implicit descent steps before the Newton polish of the
    /// half-domain minimizer.
    pub descent_steps: usize,
    /// Decreasing ε values for [`continuation`].
    pub schedule: Vec<f64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { tolerance: 1e-9, max_iterations: 200, max_halvings: 20, descent_steps: 400, schedule: Vec::new() }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidOptions(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidOptions("max_iterations must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Minimizer,
    Newton,
    Shooting,
    Continuation,
}

/// A converged steady state with its diagnostics.
#[derive(Debug, Clone)]
pub struct SolutionRecord {
    pub profile: RadialProfile,
    pub residual_norm: f64,
    pub energy: f64,
    /// `None` for the zero solution.
    pub nodal: Option<NodalDecomposition>,
    pub provenance: Provenance,
    /// Pole value the shooting scan started from, when applicable.
    pub alpha_seed: Option<f64>,
    pub iterations: usize,
    /// Residual sup-norm before each Newton iteration.
    pub residual_history: Vec<f64>,
}

impl SolutionRecord {
    fn from_profile(
        profile: RadialProfile,
        provenance: Provenance,
        iterations: usize,
        residual_history: Vec<f64>,
    ) -> Self {
        let residual_norm = sup_norm(&crate::field::ac_residual(&profile));
        let energy = energy(&profile);
        let nodal = nodal_decomposition(&profile, NODAL_TOL).ok();
        Self { profile, residual_norm, energy, nodal, provenance, alpha_seed: None, iterations, residual_history }
    }

    pub fn zeros(&self) -> Vec<f64> {
        self.nodal.as_ref().map(|d| d.zeros()).unwrap_or_default()
    }

    pub fn is_constant(&self) -> bool {
        let v = &self.profile.values;
        v.iter().all(|x| (x - v[0]).abs() <= 1e-12)
    }
}

/// Jacobian of the residual, Δₕ − diag(W″(u)/ε²), over the first `active`
/// nodes of `u`. Nodes past `active` are held fixed (Dirichlet data).
#[allow(clippy::needless_range_loop)]
fn jacobian(metric: &SphereMetric, epsilon: f64, well: &DoubleWell, u: &[f64], active: usize) -> Tridiagonal {
    let inv_eps2 = 1.0 / (epsilon * epsilon);
    let last = u.len() - 1;
    let mut lower = Vec::with_capacity(active.saturating_sub(1));
    let mut diag = Vec::with_capacity(active);
    let mut upper = Vec::with_capacity(active.saturating_sub(1));
    for i in 0..active {
        let m = metric.mass[i];
        let right = if i < last { metric.conductance[i] / m } else { 0.0 };
        let left = if i > 0 { metric.conductance[i - 1] / m } else { 0.0 };
        diag.push(-(left + right) - well.second_derivative(u[i]) * inv_eps2);
        if i + 1 < active {
            upper.push(right);
        }
        if i > 0 {
            lower.push(left);
        }
    }
    Tridiagonal::new(lower, diag, upper)
}

fn active_residual(metric: &SphereMetric, epsilon: f64, well: &DoubleWell, u: &[f64], active: usize) -> Vec<f64> {
    let inv_eps2 = 1.0 / (epsilon * epsilon);
    (0..active).map(|i| laplacian_at(metric, u, i) - well.derivative(u[i]) * inv_eps2).collect()
}

fn euclid(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum::<f64>().sqrt()
}

struct NewtonOutcome {
    values: Vec<f64>,
    iterations: usize,
    history: Vec<f64>,
}

/// Accepted steps must improve on the worst of this many recent residuals
/// (Grippo-Lampariello-Lucidi). A strictly monotone search stalls on
/// near-translation directions, where a full step briefly bends the layer.
const NONMONOTONE_WINDOW: usize = 10;

/// Damped Newton on the first `active` entries of `u`.
fn newton_core(
    metric: &SphereMetric,
    epsilon: f64,
    well: &DoubleWell,
    mut u: Vec<f64>,
    active: usize,
    opts: &SolveOptions,
) -> Result<NewtonOutcome> {
    let mut r = active_residual(metric, epsilon, well, &u, active);
    let mut history = Vec::new();
    let mut merit = Vec::with_capacity(NONMONOTONE_WINDOW + 1);
    let mut iterations = 0;
    loop {
        let norm = sup_norm(&r);
        history.push(norm);
        if norm <= opts.tolerance {
            break;
        }
        if iterations == opts.max_iterations || !norm.is_finite() {
            return Err(Error::NoConvergence { iterations, residual: norm });
        }
        iterations += 1;
        let step = newton_direction(metric, epsilon, well, &u, &r, active)?;
        merit.push(euclid(&r));
        if merit.len() > NONMONOTONE_WINDOW {
            merit.remove(0);
        }
        let base = merit.iter().copied().fold(0.0, f64::max);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<f64> = u.iter().enumerate().map(|(i, v)| if i < active { v + t * step[i] } else { *v }).collect();
            let r_trial = active_residual(metric, epsilon, well, &trial, active);
            if euclid(&r_trial) < (1.0 - 1e-4 * t) * base {
                accepted = Some((trial, r_trial));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((trial, r_trial)) => {
                u = trial;
                r = r_trial;
            }
            None => return Err(Error::NoConvergence { iterations, residual: norm }),
        }
    }

    // One more undamped step pushes the residual down to rounding level; it is
    // kept only if it helps.
    if history.last().copied().unwrap_or(0.0) > 0.0 {
        if let Ok(step) = newton_direction(metric, epsilon, well, &u, &r, active) {
            let trial: Vec<f64> = u.iter().enumerate().map(|(i, v)| if i < active { v + step[i] } else { *v }).collect();
            let r_trial = active_residual(metric, epsilon, well, &trial, active);
            if sup_norm(&r_trial) < sup_norm(&r) {
                u = trial;
            }
        }
    }
    Ok(NewtonOutcome { values: u, iterations, history })
}

fn newton_direction(
    metric: &SphereMetric,
    epsilon: f64,
    well: &DoubleWell,
    u: &[f64],
    r: &[f64],
    active: usize,
) -> Result<Vec<f64>> {
    let jac = jacobian(metric, epsilon, well, u, active);
    let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
    jac.solve(&rhs)
}

/// Damped Newton on the whole sphere (Neumann at both poles).
pub fn newton_solve(initial: &RadialProfile, opts: &SolveOptions) -> Result<SolutionRecord> {
    opts.validate()?;
    if initial.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidOptions("initial profile has non-finite values".into()));
    }
    let metric = &initial.metric;
    let active = metric.nodes();
    let out = newton_core(metric, initial.epsilon, &initial.well, initial.values.clone(), active, opts)?;
    let profile = initial.with_values(out.values);
    Ok(SolutionRecord::from_profile(profile, Provenance::Newton, out.iterations, out.history))
}

/// Energy of the half [0, s_c] with the center cell split evenly, so that the
/// energy of an odd-reflected profile is twice this value.
pub fn half_energy(metric: &SphereMetric, epsilon: f64, well: &DoubleWell, half: &[f64]) -> f64 {
    let c = half.len() - 1;
    let gradient: f64 = half.windows(2).zip(&metric.conductance).map(|(p, k)| k * (p[1] - p[0]).powi(2)).sum();
    let potential: f64 =
        half[..c].iter().zip(&metric.mass).map(|(v, m)| m * well.value(*v)).sum::<f64>() + 0.5 * metric.mass[c] * well.value(half[c]);
    metric.slice_unit_volume() * (0.5 * epsilon * gradient + potential / epsilon)
}

/// Result of the half-domain minimization: values on nodes 0..=c with the
/// last entry pinned at zero.
#[derive(Debug, Clone)]
pub struct HalfMinimizer {
    pub values: Vec<f64>,
    pub half_energy: f64,
    pub residual_norm: f64,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
}

fn center_index(metric: &SphereMetric) -> Result<usize> {
    metric.center_index().ok_or(Error::AsymmetricGrid(metric.nodes()))
}

/// Layer-shaped seed tanh((s_c − s)/(√2ε)) clamped to [0, 1] on the half.
pub fn half_ansatz(metric: &SphereMetric, epsilon: f64) -> Result<Vec<f64>> {
    let c = center_index(metric)?;
    let sc = metric.center();
    let k = 1.0 / (std::f64::consts::SQRT_2 * epsilon);
    let mut v: Vec<f64> = (0..=c).map(|i| (k * (sc - metric.grid.node(i))).tanh().clamp(0.0, 1.0)).collect();
    v[c] = 0.0;
    Ok(v)
}

/// Nonnegative minimizer of the energy on [0, s_c] with u(s_c) = 0:
/// projected semi-implicit descent (clamped to [0, 1]) followed by a Newton
/// polish of the Dirichlet problem.
pub fn minimize_dirichlet_half(
    metric: &SphereMetric,
    epsilon: f64,
    well: &DoubleWell,
    opts: &SolveOptions,
) -> Result<HalfMinimizer> {
    opts.validate()?;
    if !(epsilon > 0.0) {
        return Err(Error::InvalidOptions(format!("epsilon must be positive, got {epsilon}")));
    }
    let c = center_index(metric)?;
    let mut u = half_ansatz(metric, epsilon)?;

    let dt = 0.25 * epsilon * epsilon;
    let inv_eps2 = 1.0 / (epsilon * epsilon);
    let system = implicit_diffusion_matrix(metric, dt, c);
    for _ in 0..opts.descent_steps {
        let rhs: Vec<f64> = (0..c).map(|i| u[i] - dt * well.derivative(u[i]) * inv_eps2).collect();
        let next = system.solve(&rhs)?;
        for (ui, ni) in u.iter_mut().zip(next) {
            *ui = ni.clamp(0.0, 1.0);
        }
    }

    let trivial = |v: &[f64]| v.iter().fold(0.0_f64, |m, x| m.max(x.abs())) < 1e-6;
    if trivial(&u) {
        return Err(Error::TrivialMinimizer { epsilon });
    }
    let out = newton_core(metric, epsilon, well, u, c, opts)?;
    if trivial(&out.values) {
        return Err(Error::TrivialMinimizer { epsilon });
    }
    if out.values.iter().any(|v| *v < -opts.tolerance) {
        // Newton left the positive cone: not the Brezis–Oswald minimizer.
        return Err(Error::NoConvergence { iterations: out.iterations, residual: f64::NAN });
    }
    let residual_norm = sup_norm(&active_residual(metric, epsilon, well, &out.values, c));
    Ok(HalfMinimizer {
        half_energy: half_energy(metric, epsilon, well, &out.values),
        values: out.values,
        residual_norm,
        iterations: out.iterations,
        residual_history: out.history,
    })
}

/// I − dt·Δₕ on nodes 0..active (Neumann pole, later nodes as Dirichlet data).
pub(crate) fn implicit_diffusion_matrix(metric: &SphereMetric, dt: f64, active: usize) -> Tridiagonal {
    let last = metric.nodes() - 1;
    let mut lower = Vec::with_capacity(active.saturating_sub(1));
    let mut diag = Vec::with_capacity(active);
    let mut upper = Vec::with_capacity(active.saturating_sub(1));
    for i in 0..active {
        let m = metric.mass[i];
        let right = if i < last { dt * metric.conductance[i] / m } else { 0.0 };
        let left = if i > 0 { dt * metric.conductance[i - 1] / m } else { 0.0 };
        diag.push(1.0 + left + right);
        if i + 1 < active {
            upper.push(-right);
        }
        if i > 0 {
            lower.push(-left);
        }
    }
    Tridiagonal::new(lower, diag, upper)
}

/// Odd extension of half-domain values across the middle node.
pub fn odd_extension(half: &[f64]) -> Vec<f64> {
    let c = half.len() - 1;
    let mut full = half.to_vec();
    full.extend(half[..c].iter().rev().map(|v| -v));
    full
}

/// v_ε: the odd reflection of the half minimizer, polished on the full sphere.
pub fn symmetric_solution(
    metric: Arc<SphereMetric>,
    epsilon: f64,
    well: DoubleWell,
    opts: &SolveOptions,
) -> Result<SolutionRecord> {
    let half = minimize_dirichlet_half(&metric, epsilon, &well, opts)?;
    let seed = RadialProfile::new(metric, epsilon, well, odd_extension(&half.values))?;
    let mut record = newton_solve(&seed, opts)?;
    record.provenance = Provenance::Minimizer;
    let mut history = half.residual_history;
    history.extend(record.residual_history);
    record.residual_history = history;
    Ok(record)
}

/// Warm-started solves along a strictly decreasing ε schedule, starting from
/// v_ε at the first value.
pub fn continuation(
    metric: Arc<SphereMetric>,
    schedule: &[f64],
    well: DoubleWell,
    opts: &SolveOptions,
) -> Result<Vec<SolutionRecord>> {
    if schedule.is_empty() {
        return Err(Error::InvalidOptions("empty epsilon schedule".into()));
    }
    if schedule.iter().any(|e| !(*e > 0.0)) || schedule.windows(2).any(|p| p[1] >= p[0]) {
        return Err(Error::InvalidOptions("epsilon schedule must be positive and strictly decreasing".into()));
    }
    let wrap = |epsilon: f64| move |e: Error| Error::ContinuationFailed { epsilon, source: Box::new(e) };
    let first = symmetric_solution(metric, schedule[0], well, opts).map_err(wrap(schedule[0]))?;
    let mut chain = vec![first];
    for &epsilon in &schedule[1..] {
        let prev = &chain.last().unwrap().profile;
        let seed = RadialProfile { epsilon, ..prev.clone() };
        let mut record = newton_solve(&seed, opts).map_err(wrap(epsilon))?;
        record.provenance = Provenance::Continuation;
        chain.push(record);
    }
    Ok(chain)
}

/// One shooting trajectory from the pole.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotSample {
    pub alpha: f64,
    /// u′ where the integration stopped.
    pub mismatch: f64,
    /// Set when |u| exceeded 2 before the far pole.
    pub blow_up: Option<f64>,
}

/// Census of radial solutions reached from a grid of pole values.
#[derive(Debug, Clone)]
pub struct ShootingCensus {
    pub epsilon: f64,
    pub samples: Vec<ShotSample>,
    pub members: Vec<SolutionRecord>,
    /// Bracketed seeds whose Newton polish failed.
    pub failed_seeds: Vec<f64>,
}

impl ShootingCensus {
    pub fn nonconstant(&self) -> impl Iterator<Item = &SolutionRecord> {
        self.members.iter().filter(|m| !m.is_constant())
    }
}

/// Pole values α = tanh(ξ) with ξ uniform on [−ξ_max, ξ_max]; clusters
/// samples near the wells where the layered solutions start.
pub fn tanh_alpha_grid(count: usize, xi_max: f64) -> Vec<f64> {
    if count < 2 {
        return vec![0.0; count];
    }
    (0..count).map(|j| (-xi_max + 2.0 * xi_max * j as f64 / (count - 1) as f64).tanh()).collect()
}

/// w and w′ at every multiple of h/8, the abscissae RK4 with step h/4 visits.
struct WarpTable {
    w: Vec<f64>,
    w_prime: Vec<f64>,
    step: f64,
}

impl WarpTable {
    const REFINE: usize = 8;

    fn new(metric: &SphereMetric) -> Self {
        let last = metric.nodes() - 1;
        let count = Self::REFINE * last + 1;
        let step = metric.h() / Self::REFINE as f64;
        let mut w = Vec::with_capacity(count);
        let mut w_prime = Vec::with_capacity(count);
        for j in 0..count {
            let (dist, sign) = if 2 * j < count { (j as f64 * step, 1.0) } else { ((count - 1 - j) as f64 * step, -1.0) };
            let (v, d, _) = metric.warp.eval(dist);
            w.push(v);
            w_prime.push(sign * d);
        }
        Self { w, w_prime, step }
    }
}

struct Trajectory {
    /// u at the grid nodes reached before stopping.
    node_values: Vec<f64>,
    mismatch: f64,
    blow_up: Option<f64>,
}

/// RK4 for u″ = −(n−1)(w′/w)u′ + W′(u)/ε² from the pole with u(0) = α,
/// u′(0) = 0, started one step out from the series
/// u ≈ α + W′(α)s²/(2nε²). Stops one step short of the far pole.
fn shoot(metric: &SphereMetric, table: &WarpTable, epsilon: f64, well: &DoubleWell, alpha: f64) -> Trajectory {
    let n = metric.dim as f64;
    let inv_eps2 = 1.0 / (epsilon * epsilon);
    let sub = WarpTable::REFINE / 2; // RK4 step h/4 = 2 table cells
    let step = 2.0 * table.step;
    let total_steps = (metric.nodes() - 1) * sub;

    let rhs = |j_half: usize, u: f64, p: f64| -> (f64, f64) {
        let (w, wp) = (table.w[j_half], table.w_prime[j_half]);
        (p, -(n - 1.0) * wp / w * p + well.derivative(u) * inv_eps2)
    };

    let forcing = well.derivative(alpha) * inv_eps2 / n;
    let mut u = alpha + 0.5 * forcing * step * step;
    let mut p = forcing * step;
    let mut node_values = vec![alpha];
    // index into the table (in units of h/8) of the current abscissa
    let mut j = 2;
    for k in 1..total_steps - 1 {
        let (k1u, k1p) = rhs(j, u, p);
        let (k2u, k2p) = rhs(j + 1, u + 0.5 * step * k1u, p + 0.5 * step * k1p);
        let (k3u, k3p) = rhs(j + 1, u + 0.5 * step * k2u, p + 0.5 * step * k2p);
        let (k4u, k4p) = rhs(j + 2, u + step * k3u, p + step * k3p);
        if k % sub == 0 {
            node_values.push(u);
        }
        u += step / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        p += step / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        j += 2;
        if !(u.abs() <= 2.0) {
            return Trajectory { node_values, mismatch: p, blow_up: Some(j as f64 * table.step) };
        }
    }
    Trajectory { node_values, mismatch: p, blow_up: None }
}

/// Mismatch u′ near the far pole for one pole value.
pub fn shooting_mismatch(metric: &SphereMetric, epsilon: f64, well: &DoubleWell, alpha: f64) -> ShotSample {
    let table = WarpTable::new(metric);
    let t = shoot(metric, &table, epsilon, well, alpha);
    ShotSample { alpha, mismatch: t.mismatch, blow_up: t.blow_up }
}

/// Scans pole values, brackets sign changes of the far-pole mismatch,
/// refines each by bisection, and polishes the resulting profile with Newton.
/// Members closer than 1e−6 in sup-norm are merged.
pub fn shooting_scan(
    metric: Arc<SphereMetric>,
    epsilon: f64,
    well: DoubleWell,
    alpha_grid: &[f64],
    opts: &SolveOptions,
) -> Result<ShootingCensus> {
    opts.validate()?;
    let table = WarpTable::new(&metric);
    let samples: Vec<ShotSample> = alpha_grid
        .iter()
        .map(|&alpha| {
            let t = shoot(&metric, &table, epsilon, &well, alpha);
            ShotSample { alpha, mismatch: t.mismatch, blow_up: t.blow_up }
        })
        .collect();

    let mut seeds = Vec::new();
    for (i, s) in samples.iter().enumerate() {
        if s.mismatch == 0.0 {
            seeds.push(s.alpha);
        }
        if let Some(next) = samples.get(i + 1) {
            if s.mismatch * next.mismatch < 0.0 {
                seeds.push(bisect_alpha(&metric, &table, epsilon, &well, s.alpha, next.alpha, s.mismatch));
            }
        }
    }

    let mut census = ShootingCensus { epsilon, samples, members: Vec::new(), failed_seeds: Vec::new() };
    for alpha in seeds {
        let traj = shoot(&metric, &table, epsilon, &well, alpha);
        let seed = seed_profile(&metric, &traj);
        let initial = RadialProfile::new(metric.clone(), epsilon, well, seed)?;
        match newton_solve(&initial, opts) {
            Ok(mut record) => {
                record.provenance = Provenance::Shooting;
                record.alpha_seed = Some(alpha);
                let duplicate = census.members.iter().any(|m| m.profile.sup_distance(&record.profile) <= 1e-6);
                if !duplicate {
                    census.members.push(record);
                }
            }
            Err(_) => census.failed_seeds.push(alpha),
        }
    }
    Ok(census)
}

fn bisect_alpha(
    metric: &SphereMetric,
    table: &WarpTable,
    epsilon: f64,
    well: &DoubleWell,
    mut lo: f64,
    mut hi: f64,
    m_lo: f64,
) -> f64 {
    let sign_lo = m_lo.signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            break;
        }
        let m = shoot(metric, table, epsilon, well, mid).mismatch;
        if m == 0.0 {
            return mid;
        }
        if m.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Grid profile from a trajectory; nodes past a blow-up keep the last value
/// clamped into [−1, 1].
fn seed_profile(metric: &SphereMetric, traj: &Trajectory) -> Vec<f64> {
    let nodes = metric.nodes();
    let mut values: Vec<f64> = traj.node_values.iter().map(|v| v.clamp(-1.0, 1.0)).collect();
    let fill = *values.last().unwrap_or(&0.0);
    values.resize(nodes, fill);
    values
}

/// Sup-norm of the residual recomputed from scratch.
pub fn residual_norm(u: &RadialProfile) -> f64 {
    sup_norm(&residual_values(&u.metric, u.epsilon, &u.well, &u.values))
}

/// Energy of the full profile (re-exported helper for callers holding raw
/// values).
pub fn profile_energy(metric: &SphereMetric, epsilon: f64, well: &DoubleWell, values: &[f64]) -> f64 {
    energy_values(metric, epsilon, well, values)
}

/// Largest antisymmetry defect max |v(s) + v(2R − s)|.
pub fn antisymmetry_defect(values: &[f64]) -> f64 {
    let reversed: Vec<f64> = values.iter().rev().map(|v| -v).collect();
    sup_distance(values, &reversed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::WarpFunction;

    fn metric(nodes: usize) -> Arc<SphereMetric> {
        Arc::new(SphereMetric::new(3, 3.0, nodes, WarpFunction::standard().unwrap()).unwrap())
    }

    #[test]
    fn constant_one_needs_no_iterations() {
        let u = RadialProfile::constant(metric(257), 0.6, DoubleWell::quartic(), 1.0).unwrap();
        let rec = newton_solve(&u, &SolveOptions::default()).unwrap();
        assert_eq!(rec.iterations, 0);
        assert_eq!(rec.residual_norm, 0.0);
    }

    #[test]
    fn options_are_validated() {
        let u = RadialProfile::constant(metric(129), 0.6, DoubleWell::quartic(), 1.0).unwrap();
        let bad = SolveOptions { tolerance: 0.0, ..Default::default() };
        assert!(matches!(newton_solve(&u, &bad), Err(Error::InvalidOptions(_))));
        let bad = SolveOptions { max_iterations: 0, ..Default::default() };
        assert!(matches!(newton_solve(&u, &bad), Err(Error::InvalidOptions(_))));
    }

    #[test]
    fn iteration_cap_reports_no_convergence() {
        let m = metric(257);
        let u = RadialProfile::layer(m, 0.6, DoubleWell::quartic(), 0.9).unwrap();
        let opts = SolveOptions { max_iterations: 1, tolerance: 1e-14, ..Default::default() };
        assert!(matches!(newton_solve(&u, &opts), Err(Error::NoConvergence { .. })));
    }

    #[test]
    fn huge_epsilon_gives_trivial_minimizer() {
        let m = metric(257);
        let eps = 10.0 * m.total_length();
        let err = minimize_dirichlet_half(&m, eps, &DoubleWell::quartic(), &SolveOptions::default()).unwrap_err();
        assert_eq!(err, Error::TrivialMinimizer { epsilon: eps });
    }

    #[test]
    fn even_grid_is_rejected_for_half_problem() {
        let m = metric(256);
        let err = minimize_dirichlet_half(&m, 0.6, &DoubleWell::quartic(), &SolveOptions::default()).unwrap_err();
        assert_eq!(err, Error::AsymmetricGrid(256));
    }

    #[test]
    fn odd_extension_layout() {
        assert_eq!(odd_extension(&[3.0, 2.0, 0.0]), vec![3.0, 2.0, 0.0, -2.0, -3.0]);
    }

    #[test]
    fn continuation_rejects_bad_schedule() {
        let m = metric(129);
        let opts = SolveOptions::default();
        assert!(continuation(m.clone(), &[], DoubleWell::quartic(), &opts).is_err());
        assert!(continuation(m.clone(), &[0.3, 0.6], DoubleWell::quartic(), &opts).is_err());
        assert!(continuation(m, &[0.3, -0.1], DoubleWell::quartic(), &opts).is_err());
    }

    #[test]
    fn equilibria_have_zero_mismatch() {
        let m = metric(257);
        for alpha in [-1.0, 0.0, 1.0] {
            let s = shooting_mismatch(&m, 0.6, &DoubleWell::quartic(), alpha);
            assert_eq!(s.mismatch, 0.0);
            assert!(s.blow_up.is_none());
        }
    }

    #[test]
    fn tanh_grid_is_symmetric_and_inside() {
        let g = tanh_alpha_grid(400, 12.0);
        assert_eq!(g.len(), 400);
        for (x, y) in g.iter().zip(g.iter().rev()) {
            assert!((x + y).abs() < 1e-15);
            assert!(x.abs() < 1.0);
        }
    }
}
