//! Parabolic Allen-Cahn flow uₜ = Δu − W′(u)/ε² with a semi-implicit step
//! (implicit diffusion, explicit reaction), and the experiments built on it:
//! the monotone subsolution flow of the Frankel argument, interface drift of
//! an off-center layer, and a nodewise comparison audit.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::elliptic::{symmetric_solution, SolutionRecord, SolveOptions};
use crate::error::{Error, Result};
use crate::field::{ac_residual, energy_values, heteroclinic, nodal_decomposition, DoubleWell, RadialProfile, Sign, NODAL_TOL};
use crate::geometry::SphereMetric;
use crate::spectral::{eigenfunction, linearized_spectrum};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowOptions {
    /// Time step; `None` means ε²/4.
    pub dt: Option<f64>,
    /// End time; `None` means the experiment's default multiple of ε².
    pub t_end: Option<f64>,
    pub check_monotone: bool,
    /// Steps between recorded snapshots.
    pub snapshot_stride: usize,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self { dt: None, t_end: None, check_monotone: true, snapshot_stride: 100 }
    }
}

impl FlowOptions {
    fn resolve(&self, epsilon: f64, default_end: f64) -> Result<(f64, f64)> {
        let dt = self.dt.unwrap_or(0.25 * epsilon * epsilon);
        let t_end = self.t_end.unwrap_or(default_end * epsilon * epsilon);
        if !(dt > 0.0) {
            return Err(Error::InvalidOptions(format!("dt must be positive, got {dt}")));
        }
        if !(t_end >= dt) {
            return Err(Error::InvalidOptions(format!("end time {t_end} is shorter than dt {dt}")));
        }
        if self.snapshot_stride == 0 {
            return Err(Error::InvalidOptions("snapshot stride must be >= 1".into()));
        }
        Ok((dt, t_end))
    }
}

/// Snapshots of a flow run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FlowTrace {
    pub times: Vec<f64>,
    /// First zero of the profile, `None` when it is single-signed.
    pub interface: Vec<Option<f64>>,
    pub energy: Vec<f64>,
    /// min over nodes and over the steps since the previous snapshot of u⁺ − u.
    pub min_step_increment: Vec<f64>,
    pub steps: usize,
    /// Largest per-step energy increase seen (≤ 0 for a dissipative run).
    pub max_energy_increase: f64,
    /// Smallest per-step nodewise increment over the whole run.
    pub min_increment: f64,
}

impl FlowTrace {
    pub fn final_time(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }
}

/// Semi-implicit stepper with the diffusion matrix factored once.
pub struct FlowStepper {
    metric: Arc<SphereMetric>,
    epsilon: f64,
    well: DoubleWell,
    dt: f64,
    lower: Vec<f64>,
    /// Thomas elimination: modified upper coefficients and pivots.
    c_prime: Vec<f64>,
    pivot: Vec<f64>,
}

impl FlowStepper {
    pub fn new(metric: Arc<SphereMetric>, epsilon: f64, well: DoubleWell, dt: f64) -> Result<Self> {
        let limit = 0.5 * epsilon * epsilon;
        if dt > limit {
            return Err(Error::StepTooLarge { dt, limit });
        }
        if !(dt > 0.0) {
            return Err(Error::InvalidOptions(format!("dt must be positive, got {dt}")));
        }
        let system = crate::elliptic::implicit_diffusion_matrix(&metric, dt, metric.nodes());
        // I − dtΔₕ is strictly diagonally dominant, so no pivoting is needed.
        let n = system.len();
        let mut c_prime = vec![0.0; n];
        let mut pivot = vec![0.0; n];
        pivot[0] = system.diag[0];
        for i in 0..n {
            if i > 0 {
                pivot[i] = system.diag[i] - system.lower[i - 1] * c_prime[i - 1];
            }
            if i + 1 < n {
                c_prime[i] = system.upper[i] / pivot[i];
            }
        }
        Ok(Self { metric, epsilon, well, dt, lower: system.lower, c_prime, pivot })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Solves (I − dtΔₕ)u⁺ = u − dt·W′(u)/ε² into `out`.
    pub fn step_into(&self, u: &[f64], out: &mut [f64]) {
        let n = u.len();
        let scale = self.dt / (self.epsilon * self.epsilon);
        let rhs = |i: usize| u[i] - scale * self.well.derivative(u[i]);
        out[0] = rhs(0) / self.pivot[0];
        for i in 1..n {
            out[i] = (rhs(i) - self.lower[i - 1] * out[i - 1]) / self.pivot[i];
        }
        for i in (0..n - 1).rev() {
            out[i] -= self.c_prime[i] * out[i + 1];
        }
    }

    pub fn step(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; u.len()];
        self.step_into(u, &mut out);
        out
    }

    pub fn metric(&self) -> &SphereMetric {
        &self.metric
    }
}

/// One semi-implicit step; requires dt ≤ ε²/2 so the explicit reaction keeps
/// the scheme monotone on [−1, 1].
pub fn flow_step(u: &RadialProfile, dt: f64) -> Result<RadialProfile> {
    let stepper = FlowStepper::new(u.metric.clone(), u.epsilon, u.well, dt)?;
    Ok(u.with_values(stepper.step(&u.values)))
}

/// First zero of the profile by linear interpolation.
pub fn interface_position(u: &RadialProfile) -> Option<f64> {
    nodal_decomposition(u, NODAL_TOL).ok().and_then(|d| d.zeros().first().copied())
}

/// Stopping rule for [`run_flow`].
enum StopWhen {
    /// sup |u − target| ≤ tol.
    Reached { target: f64, tol: f64 },
    Never,
}

struct FlowRun {
    values: Vec<f64>,
    trace: FlowTrace,
    interface_lost: Option<f64>,
}

/// Runs the flow to `t_end` (or until the stop rule fires) recording the
/// trace. `monotone_sign` = +1 / −1 asserts nondecreasing / nonincreasing
/// nodal values per step, with slack 1e−10.
fn run_flow(
    stepper: &FlowStepper,
    initial: &RadialProfile,
    t_end: f64,
    stride: usize,
    monotone_sign: Option<f64>,
    stop: StopWhen,
    stop_on_lost_interface: bool,
) -> Result<FlowRun> {
    let metric = &initial.metric;
    let (eps, well) = (initial.epsilon, initial.well);
    let dt = stepper.dt();
    let mut u = initial.values.clone();
    let mut next = vec![0.0; u.len()];
    let mut trace = FlowTrace { max_energy_increase: f64::NEG_INFINITY, min_increment: f64::INFINITY, ..Default::default() };
    let mut e = energy_values(metric, eps, &well, &u);
    let mut window_min = f64::INFINITY;
    let mut interface_lost = None;

    let record = |trace: &mut FlowTrace, t: f64, values: &[f64], e: f64, window_min: f64| {
        trace.times.push(t);
        trace.interface.push(interface_position(&initial.with_values(values.to_vec())));
        trace.energy.push(e);
        trace.min_step_increment.push(window_min);
    };
    record(&mut trace, 0.0, &u, e, 0.0);

    let total_steps = (t_end / dt).round().max(1.0) as usize;
    for step in 1..=total_steps {
        stepper.step_into(&u, &mut next);
        let increment = u.iter().zip(&next).fold(f64::INFINITY, |m, (a, b)| m.min(monotone_sign.unwrap_or(1.0) * (b - a)));
        if monotone_sign.is_some() && increment < -1e-10 {
            return Err(Error::MonotonicityViolated { step, min_increment: increment });
        }
        window_min = window_min.min(increment);
        trace.min_increment = trace.min_increment.min(increment);
        let e_next = energy_values(metric, eps, &well, &next);
        trace.max_energy_increase = trace.max_energy_increase.max(e_next - e);
        e = e_next;
        std::mem::swap(&mut u, &mut next);
        trace.steps = step;
        let t = step as f64 * dt;

        let done = match stop {
            StopWhen::Reached { target, tol } => u.iter().all(|v| (v - target).abs() <= tol),
            StopWhen::Never => false,
        };
        let lost = stop_on_lost_interface && {
            let first = u[0];
            u.iter().all(|v| v * first > 0.0)
        };
        if step % stride == 0 || step == total_steps || done || lost {
            record(&mut trace, t, &u, e, window_min);
            window_min = f64::INFINITY;
        }
        if lost {
            interface_lost = Some(t);
            break;
        }
        if done {
            break;
        }
    }
    Ok(FlowRun { values: u, trace, interface_lost })
}

/// u + θφ₁ with θ = θ_fraction · ε²(−λ₁)/C, φ₁ the positive ground state of
/// the linearization normalized to sup 1.
#[derive(Debug, Clone)]
pub struct Perturbation {
    pub profile: RadialProfile,
    pub lambda1: f64,
    pub theta: f64,
    pub ground_state: RadialProfile,
}

pub fn perturb_by_eigenfunction(u: &SolutionRecord, theta_fraction: f64) -> Result<Perturbation> {
    if !(0.0..1.0).contains(&theta_fraction) {
        return Err(Error::InvalidOptions(format!("theta fraction must lie in [0, 1), got {theta_fraction}")));
    }
    let profile = &u.profile;
    let report = linearized_spectrum(profile, 1, 2)?;
    let lambda1 = report.modes[0].eigenvalues[0];
    if lambda1 >= 0.0 {
        return Err(Error::StableInput { lambda1 });
    }
    let ground_state = eigenfunction(profile, &report, 0, 0)?;
    let theta = theta_fraction * profile.epsilon * profile.epsilon * (-lambda1) / profile.well.remainder_constant();
    let values = profile.values.iter().zip(&ground_state.values).map(|(v, p)| v + theta * p).collect();
    Ok(Perturbation { profile: profile.with_values(values), lambda1, theta, ground_state })
}

/// Which constant the Frankel flow is pushed toward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// v_ε + θφ₁, nondecreasing toward +1.
    Up,
    /// −v_ε − θφ₁, nonincreasing toward −1.
    Down,
}

#[derive(Debug, Clone)]
pub struct FrankelOutcome {
    pub trace: FlowTrace,
    pub lambda1: f64,
    pub theta: f64,
    /// min over nodes of the residual of the (signed) initial data.
    pub min_initial_residual: f64,
    pub converged: bool,
    pub final_distance: f64,
    /// max over the run of u − 1 (Up) or −1 − u (Down); negative when the
    /// flow stays strictly below the comparator.
    pub max_overshoot: f64,
    pub final_profile: RadialProfile,
}

/// Flows v_ε + θφ₁ (or its mirror) and checks the mechanism of the Frankel
/// argument: a strict subsolution below the constant comparator increases
/// monotonically and settles on the comparator.
pub fn frankel_experiment(
    metric: Arc<SphereMetric>,
    epsilon: f64,
    well: DoubleWell,
    theta_fraction: f64,
    direction: Direction,
    flow: &FlowOptions,
    solve: &SolveOptions,
) -> Result<FrankelOutcome> {
    let (dt, t_end) = flow.resolve(epsilon, 50.0)?;
    let v = symmetric_solution(metric.clone(), epsilon, well, solve)?;
    let pert = if theta_fraction == 0.0 {
        let report = linearized_spectrum(&v.profile, 1, 2)?;
        Perturbation { profile: v.profile.clone(), lambda1: report.modes[0].eigenvalues[0], theta: 0.0, ground_state: v.profile.clone() }
    } else {
        perturb_by_eigenfunction(&v, theta_fraction)?
    };
    let (initial, sign, target) = match direction {
        Direction::Up => (pert.profile.clone(), 1.0, 1.0),
        Direction::Down => (pert.profile.negated(), -1.0, -1.0),
    };
    let min_initial_residual = ac_residual(&initial).iter().fold(f64::INFINITY, |m, r| m.min(sign * r));

    let stepper = FlowStepper::new(metric, epsilon, well, dt)?;
    let run = run_flow(
        &stepper,
        &initial,
        t_end,
        flow.snapshot_stride,
        flow.check_monotone.then_some(sign),
        StopWhen::Reached { target, tol: 1e-4 },
        false,
    )?;
    let final_distance = run.values.iter().fold(0.0_f64, |m, x| m.max((x - target).abs()));
    let max_overshoot = run.values.iter().fold(f64::NEG_INFINITY, |m, x| m.max(sign * (x - target)));
    Ok(FrankelOutcome {
        trace: run.trace,
        lambda1: pert.lambda1,
        theta: pert.theta,
        min_initial_residual,
        converged: final_distance <= 1e-4,
        final_distance,
        max_overshoot,
        final_profile: initial.with_values(run.values),
    })
}

#[derive(Debug, Clone)]
pub struct DriftOutcome {
    pub trace: FlowTrace,
    pub offset: f64,
    pub initial_distance: f64,
    pub final_distance: Option<f64>,
    /// Time at which the profile became single-signed.
    pub interface_lost: Option<f64>,
    pub final_profile: RadialProfile,
}

impl DriftOutcome {
    /// Whether the interface ended closer to the middle slice than it began.
    pub fn moved_toward_center(&self) -> bool {
        matches!(self.final_distance, Some(d) if d < self.initial_distance)
    }

    /// Fraction of the initial distance to s_c removed by the flow.
    pub fn reduction(&self) -> Option<f64> {
        self.final_distance.map(|d| 1.0 - d / self.initial_distance)
    }

    pub fn require_interface(&self) -> Result<()> {
        match self.interface_lost {
            Some(time) => Err(Error::InterfaceLost { time }),
            None => Ok(()),
        }
    }
}

/// Flows a quartic layer centered at s_c + offset and tracks its interface.
/// The starting zero must lie inside the plateau, |offset| < r.
pub fn drift_experiment(
    metric: Arc<SphereMetric>,
    epsilon: f64,
    well: DoubleWell,
    offset: f64,
    flow: &FlowOptions,
) -> Result<DriftOutcome> {
    let r = metric.cylinder_half_length();
    if !(offset.abs() < r) {
        return Err(Error::InvalidOptions(format!("|offset| = {} must be below r = {r}", offset.abs())));
    }
    let (dt, t_end) = flow.resolve(epsilon, 2000.0)?;
    let center = metric.center();
    let mut values = Vec::with_capacity(metric.nodes());
    for s in metric.coords() {
        values.push(heteroclinic(center + offset - s, epsilon, &well)?);
    }
    let initial = RadialProfile::new(metric.clone(), epsilon, well, values)?;
    let initial_distance = interface_position(&initial).map(|z| (z - center).abs()).unwrap_or(offset.abs());
    let stepper = FlowStepper::new(metric, epsilon, well, dt)?;
    let run = run_flow(&stepper, &initial, t_end, flow.snapshot_stride, None, StopWhen::Never, true)?;
    let final_profile = initial.with_values(run.values);
    let final_distance = run.interface_lost.is_none().then(|| interface_position(&final_profile)).flatten().map(|z| (z - center).abs());
    Ok(DriftOutcome { trace: run.trace, offset, initial_distance, final_distance, interface_lost: run.interface_lost, final_profile })
}

/// Flows `initial` for `steps` steps at the default dt and returns the result.
pub fn flow_steps(initial: &RadialProfile, steps: usize, dt: Option<f64>) -> Result<RadialProfile> {
    let dt = dt.unwrap_or(0.25 * initial.epsilon * initial.epsilon);
    let stepper = FlowStepper::new(initial.metric.clone(), initial.epsilon, initial.well, dt)?;
    let mut u = initial.values.clone();
    let mut next = vec![0.0; u.len()];
    for _ in 0..steps {
        stepper.step_into(&u, &mut next);
        std::mem::swap(&mut u, &mut next);
    }
    Ok(initial.with_values(u))
}

/// Nodewise audit of v > u on the nodes of [s₁, s₂].
///
/// Preconditions: v > 0 on every node of the interval, and u ≤ 0 at each
/// endpoint node that is not a pole (a pole is interior to its nodal domain).
pub fn comparison_check(u: &RadialProfile, v: &RadialProfile, interval: (f64, f64)) -> Result<bool> {
    if u.len() != v.len() {
        return Err(Error::Dimension(format!("profiles have {} and {} nodes", u.len(), v.len())));
    }
    let (s1, s2) = interval;
    let coords = u.metric.coords();
    let h = u.metric.h();
    let slack = 1e-9 * h;
    let nodes: Vec<usize> = (0..coords.len()).filter(|&i| coords[i] >= s1 - slack && coords[i] <= s2 + slack).collect();
    let (Some(&first), Some(&last)) = (nodes.first(), nodes.last()) else {
        return Err(Error::InvalidOptions(format!("interval [{s1}, {s2}] contains no nodes")));
    };
    let pole_last = coords.len() - 1;
    for &end in &[first, last] {
        if end != 0 && end != pole_last && u.values[end] > 0.0 {
            return Err(Error::PreconditionViolated { node: end, reason: format!("u = {:e} > 0 at an endpoint", u.values[end]) });
        }
    }
    for &i in &nodes {
        if !(v.values[i] > 0.0) {
            return Err(Error::PreconditionViolated { node: i, reason: format!("v = {:e} is not positive", v.values[i]) });
        }
    }
    Ok(nodes.iter().all(|&i| v.values[i] > u.values[i]))
}

/// Audits every ordered pair of census members: for each positive nodal
/// interval of u, widened by one cell so its end nodes carry u ≤ 0, and on
/// which v is positive, v must lie above u. Returns the number of pairs
/// checked and the number that failed.
pub fn comparison_audit(members: &[SolutionRecord]) -> (usize, usize) {
    let mut checked = 0;
    let mut failed = 0;
    for (a, u) in members.iter().enumerate() {
        let Some(nodal) = &u.nodal else { continue };
        for iv in nodal.intervals.iter().filter(|iv| iv.sign == Sign::Positive) {
            for (b, v) in members.iter().enumerate() {
                if a == b {
                    continue;
                }
                let h = u.profile.metric.h();
                let length = u.profile.metric.total_length();
                let closure = ((iv.left - h).max(0.0), (iv.right + h).min(length));
                match comparison_check(&u.profile, &v.profile, closure) {
                    Ok(pass) => {
                        checked += 1;
                        if !pass {
                            failed += 1;
                        }
                    }
                    Err(_) => continue,
                }
            }
        }
    }
    (checked, failed)
}
