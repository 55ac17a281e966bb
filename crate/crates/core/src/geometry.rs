//! Rotationally symmetric "capped cylinder" metrics on Sⁿ.
//!
//! The warp ρ is the primitive of the flat bump
//! φ(x) = exp(−x²/(a²−x²)) on [0, a), with `a` fixed by ∫₀ᵃ φ = 1, so that
//! ρ′ = φ ∈ [0, 1], ρ″ = φ′ ≤ 0 and ρ ≡ 1 past `a`. Gluing two copies of
//! [0, R] × Sⁿ⁻¹ along the totally geodesic slice {R} × Sⁿ⁻¹ gives a smooth
//! metric ds² + w(s)² g_round on Sⁿ, with s ∈ [0, 2R] the arclength from one
//! pole. Everything here works in that global coordinate.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;

/// Absolute tolerance used for every integral of φ.
pub const QUAD_TOL: f64 = 1e-12;

/// Support radius `a` of the bump φ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpParams {
    pub a: f64,
}

/// φ, φ′, φ″ at `x ≥ 0`, from closed-form differentiation of
/// exp(−q) with q = x²/(a² − x²).
pub fn bump_eval(x: f64, bump: BumpParams) -> (f64, f64, f64) {
    let a = bump.a;
    let x = x.abs();
    if x >= a {
        return (0.0, 0.0, 0.0);
    }
    let gap = a * a - x * x;
    let q = x * x / gap;
    if q > 745.0 {
        return (0.0, 0.0, 0.0);
    }
    let phi = (-q).exp();
    let dq = 2.0 * a * a * x / (gap * gap);
    let d2q = 2.0 * a * a * (a * a + 3.0 * x * x) / (gap * gap * gap);
    let d1 = -dq * phi;
    let d2 = (dq * dq - d2q) * phi;
    (phi, d1, d2)
}

fn bump_value(x: f64, a: f64) -> f64 {
    bump_eval(x, BumpParams { a }).0
}

/// ∫₀ᵃ φ(x; a) dx.
pub fn bump_mass(a: f64) -> f64 {
    adaptive_simpson(|x| bump_value(x, a), 0.0, a, QUAD_TOL)
}

/// Finds `a ∈ (1, 2)` with ∫₀ᵃ φ(x; a) dx = 1: bisection down to a bracket of
/// width 1e−6, then secant polish.
pub fn solve_bump_constant(tol: f64) -> Result<BumpParams> {
    if !(tol > 0.0) {
        return Err(Error::InvalidOptions(format!("tolerance must be positive, got {tol}")));
    }
    let residual = |a: f64| bump_mass(a) - 1.0;
    let (mut lo, mut hi) = (1.0, 2.0);
    let (mut f_lo, f_hi) = (residual(lo), residual(hi));
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return Err(Error::NoBracket { lo, hi, f_lo, f_hi });
    }
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        let f_mid = residual(mid);
        if f_mid < 0.0 {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }

    let (mut x0, mut f0) = (lo, f_lo);
    let mut x1 = hi;
    let mut f1 = residual(x1);
    for _ in 0..50 {
        if f1.abs() <= tol || f1 == f0 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = residual(x1);
        if (x1 - x0).abs() < 1e-15 {
            break;
        }
    }
    Ok(BumpParams { a: x1 })
}

/// The warp ρ = ∫₀ˣ φ with its first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WarpFunction {
    pub bump: BumpParams,
}

impl WarpFunction {
    pub fn new(bump: BumpParams) -> Self {
        Self { bump }
    }

    /// Solves for `a` at the default quadrature tolerance.
    pub fn standard() -> Result<Self> {
        Ok(Self::new(solve_bump_constant(1e-13)?))
    }

    pub fn a(&self) -> f64 {
        self.bump.a
    }

    /// (ρ, ρ′, ρ″) at `x ≥ 0`.
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        let a = self.a();
        if x >= a {
            return (1.0, 0.0, 0.0);
        }
        let (phi, d_phi, _) = bump_eval(x, self.bump);
        (1.0 - self.deficit(x), phi, d_phi)
    }

    /// 1 − ρ(x), accurate even where ρ rounds to 1.
    pub fn deficit(&self, x: f64) -> f64 {
        let a = self.a();
        if x >= a {
            0.0
        } else if x > 0.5 * a {
            adaptive_simpson(|t| bump_value(t, a), x, a, QUAD_TOL)
        } else {
            1.0 - adaptive_simpson(|t| bump_value(t, a), 0.0, x, QUAD_TOL)
        }
    }
}

/// Uniform grid on [0, L].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub nodes: usize,
    pub length: f64,
    pub spacing: f64,
}

impl Grid {
    pub const MIN_NODES: usize = 64;

    pub fn new(nodes: usize, length: f64) -> Result<Self> {
        if nodes < Self::MIN_NODES {
            return Err(Error::InvalidMetric(format!("grid needs at least {} nodes, got {nodes}", Self::MIN_NODES)));
        }
        if !(length > 0.0) {
            return Err(Error::InvalidMetric(format!("grid length must be positive, got {length}")));
        }
        Ok(Self { nodes, length, spacing: length / (nodes - 1) as f64 })
    }

    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.nodes {
            self.length
        } else {
            i as f64 * self.spacing
        }
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.nodes).map(|i| self.node(i)).collect()
    }

    /// Index of the center node, present only for odd node counts.
    pub fn center(&self) -> Option<usize> {
        (self.nodes % 2 == 1).then_some(self.nodes / 2)
    }
}

/// vol(Sᵏ) = 2π^{(k+1)/2} / Γ((k+1)/2), with Γ in closed form at integer and
/// half-integer arguments.
pub fn sphere_volume(k: usize) -> f64 {
    let m = k + 1;
    2.0 * PI.powf(m as f64 / 2.0) / gamma_half(m)
}

/// Γ(m/2) for a positive integer `m`.
fn gamma_half(m: usize) -> f64 {
    assert!((1..=64).contains(&m), "gamma_half only tabulated for 1 <= m <= 64");
    let (mut value, mut x) = if m.is_multiple_of(2) { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    let target = m as f64 / 2.0;
    while x < target {
        value *= x;
        x += 1.0;
    }
    value
}

/// The doubled warped-product metric on Sⁿ with its discretization data.
///
/// Node and midpoint warps are evaluated through the distance to the nearer
/// pole, which keeps every stored array exactly reflection symmetric.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SphereMetric {
    pub dim: usize,
    pub half_length: f64,
    pub warp: WarpFunction,
    pub grid: Grid,
    /// w, w′, w″ at the nodes.
    pub w: Vec<f64>,
    pub w_prime: Vec<f64>,
    pub w_second: Vec<f64>,
    /// w at the cell midpoints s_{i+1/2}.
    pub w_mid: Vec<f64>,
    /// Control-volume weights m_i (per unit vol(Sⁿ⁻¹)).
    pub mass: Vec<f64>,
    /// Face conductances w_{i+1/2}ⁿ⁻¹ / h.
    pub conductance: Vec<f64>,
}

impl SphereMetric {
    /// Builds the metric with `r = R − a` the cylinder half-length.
    pub fn new(dim: usize, cylinder_half_length: f64, nodes: usize, warp: WarpFunction) -> Result<Self> {
        if dim < 3 {
            return Err(Error::InvalidMetric(format!("dimension must be >= 3, got {dim}")));
        }
        if dim > 16 {
            return Err(Error::InvalidMetric(format!("dimension must be <= 16, got {dim}")));
        }
        if !(cylinder_half_length >= 0.0) {
            return Err(Error::InvalidMetric(format!("cylinder half-length must be >= 0, got {cylinder_half_length}")));
        }
        let half_length = warp.a() + cylinder_half_length;
        let grid = Grid::new(nodes, 2.0 * half_length)?;
        let h = grid.spacing;
        let last = nodes - 1;

        let mut w = Vec::with_capacity(nodes);
        let mut w_prime = Vec::with_capacity(nodes);
        let mut w_second = Vec::with_capacity(nodes);
        for i in 0..nodes {
            let (dist, sign) = if 2 * i <= last { (i as f64 * h, 1.0) } else { ((last - i) as f64 * h, -1.0) };
            let (rho, d1, d2) = warp.eval(dist);
            w.push(rho);
            w_prime.push(sign * d1);
            w_second.push(d2);
        }
        // the middle node of an odd grid sits exactly on the mirror slice
        if let Some(c) = grid.center() {
            w_prime[c] = 0.0;
        }

        let w_mid: Vec<f64> = (0..last)
            .map(|i| {
                let dist = if 2 * i < last { (i as f64 + 0.5) * h } else { ((last - i) as f64 - 0.5) * h };
                warp.eval(dist).0
            })
            .collect();

        let p = (dim - 1) as i32;
        let conductance: Vec<f64> = w_mid.iter().map(|wm| wm.powi(p) / h).collect();
        let mut mass: Vec<f64> = w.iter().map(|wi| wi.powi(p) * h).collect();
        // Pole cells: Neumann flux balance reproduces Δu = n u″ at the pole.
        mass[0] = h * w_mid[0].powi(p) / (2.0 * dim as f64);
        mass[last] = h * w_mid[last - 1].powi(p) / (2.0 * dim as f64);

        Ok(Self { dim, half_length, warp, grid, w, w_prime, w_second, w_mid, mass, conductance })
    }

    pub fn nodes(&self) -> usize {
        self.grid.nodes
    }

    pub fn h(&self) -> f64 {
        self.grid.spacing
    }

    pub fn a(&self) -> f64 {
        self.warp.a()
    }

    pub fn total_length(&self) -> f64 {
        self.grid.length
    }

    pub fn center(&self) -> f64 {
        self.half_length
    }

    pub fn center_index(&self) -> Option<usize> {
        self.grid.center()
    }

    /// r = R − a.
    pub fn cylinder_half_length(&self) -> f64 {
        self.half_length - self.a()
    }

    /// Plateau [a, 2R − a] on which w ≡ 1.
    pub fn plateau(&self) -> (f64, f64) {
        (self.a(), self.total_length() - self.a())
    }

    pub fn coords(&self) -> Vec<f64> {
        self.grid.coords()
    }

    /// vol(Sⁿ⁻¹).
    pub fn slice_unit_volume(&self) -> f64 {
        sphere_volume(self.dim - 1)
    }

    /// Vol(Sⁿ, g̃) as the sum of control volumes.
    pub fn volume(&self) -> f64 {
        self.slice_unit_volume() * self.mass.iter().sum::<f64>()
    }

    /// (w, w′, w″) at an arbitrary coordinate.
    pub fn warp_eval(&self, s: f64) -> Result<(f64, f64, f64)> {
        let length = self.total_length();
        if !(0.0..=length).contains(&s) {
            return Err(Error::OutOfDomain { s, length });
        }
        Ok(self.warp_unchecked(s))
    }

    pub(crate) fn warp_unchecked(&self, s: f64) -> (f64, f64, f64) {
        let (lo, hi) = self.plateau();
        if s >= lo && s <= hi {
            return (1.0, 0.0, 0.0);
        }
        if s <= self.half_length {
            self.warp.eval(s)
        } else {
            let (w, d1, d2) = self.warp.eval(self.total_length() - s);
            (w, -d1, d2)
        }
    }

    /// 1 − w(s), accurate near the plateau edges.
    pub fn warp_deficit(&self, s: f64) -> f64 {
        let d = s.min(self.total_length() - s).max(0.0);
        self.warp.deficit(d)
    }
}

/// Area of the coordinate slice {s} × Sⁿ⁻¹.
pub fn slice_area(metric: &SphereMetric, s: f64) -> Result<f64> {
    let (w, _, _) = metric.warp_eval(s)?;
    Ok(w.powi(metric.dim as i32 - 1) * metric.slice_unit_volume())
}

/// Per-node Ricci eigenvalues and scalar curvature.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub s: Vec<f64>,
    pub ricci_radial: Vec<f64>,
    pub ricci_tangential: Vec<f64>,
    pub scalar: Vec<f64>,
    /// −ρ″/ρ and (1 − ρ′²)/ρ² limits at a pole (both 2/a²).
    pub pole_limit: f64,
}

impl CurvatureReport {
    pub fn min_radial(&self) -> f64 {
        self.ricci_radial.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn min_tangential(&self) -> f64 {
        self.ricci_tangential.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn min_scalar(&self) -> f64 {
        self.scalar.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Ricci(∂ₛ) = −(n−1)w″/w, Ricci(X) = (n−2)(1−w′²)/w² − w″/w, and scalar
/// curvature −2(n−1)w″/w + (n−1)(n−2)(1−w′²)/w², with the removable pole
/// singularities replaced by their limit 2/a².
pub fn curvature_report(metric: &SphereMetric) -> CurvatureReport {
    let n = metric.dim as f64;
    let a = metric.a();
    let pole_limit = 2.0 / (a * a);
    let nodes = metric.nodes();
    let h = metric.h();
    let last = nodes - 1;

    let mut ricci_radial = Vec::with_capacity(nodes);
    let mut ricci_tangential = Vec::with_capacity(nodes);
    let mut scalar = Vec::with_capacity(nodes);
    for i in 0..nodes {
        let (neg_second_over_w, tangential_term) = if i == 0 || i == last {
            (pole_limit, pole_limit)
        } else {
            let dist = if 2 * i <= last { i as f64 * h } else { (last - i) as f64 * h };
            warp_ratios(metric, dist)
        };
        ricci_radial.push((n - 1.0) * neg_second_over_w);
        ricci_tangential.push((n - 2.0) * tangential_term + neg_second_over_w);
        scalar.push(2.0 * (n - 1.0) * neg_second_over_w + (n - 1.0) * (n - 2.0) * tangential_term);
    }
    CurvatureReport { s: metric.coords(), ricci_radial, ricci_tangential, scalar, pole_limit }
}

/// (−ρ″/ρ, (1 − ρ′²)/ρ²) at distance `x` from a pole; 1 − φ² is formed as
/// −expm1(−2q) to keep the small-x limit free of cancellation.
fn warp_ratios(metric: &SphereMetric, x: f64) -> (f64, f64) {
    let a = metric.a();
    if x >= a {
        return (0.0, 1.0);
    }
    let (rho, _, d2) = metric.warp.eval(x);
    let q = x * x / (a * a - x * x);
    let one_minus_phi_sq = -(-2.0 * q).exp_m1();
    (-d2 / rho, one_minus_phi_sq / (rho * rho))
}

/// f(b) = ∫₀^{a−π/2+b} φ − sin b sampled on a uniform grid of [0, π/2].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CapComparison {
    pub b: Vec<f64>,
    pub f: Vec<f64>,
    /// f′(b) = φ(a − π/2 + b) − cos b.
    pub f_prime: Vec<f64>,
    pub min_f: f64,
    pub f_end: f64,
}

/// Compares the cap against a round hemisphere: ρ over [a − π/2, a] versus
/// sin(x − a + π/2).
pub fn cap_comparison(warp: &WarpFunction, samples: usize) -> Result<CapComparison> {
    if samples < 16 {
        return Err(Error::InvalidOptions(format!("cap comparison needs >= 16 samples, got {samples}")));
    }
    let a = warp.a();
    let step = 0.5 * PI / (samples - 1) as f64;
    let mut b = Vec::with_capacity(samples);
    let mut f = Vec::with_capacity(samples);
    let mut f_prime = Vec::with_capacity(samples);
    for j in 0..samples {
        let bj = if j + 1 == samples { 0.5 * PI } else { j as f64 * step };
        let x = a - 0.5 * PI + bj;
        // (1 − sin b) − (1 − ρ(x)), with 1 − sin b = 2 sin²((π/2 − b)/2)
        let half = 0.5 * (0.5 * PI - bj);
        let one_minus_sin = 2.0 * half.sin() * half.sin();
        b.push(bj);
        f.push(one_minus_sin - warp.deficit(x));
        f_prime.push(bump_eval(x, warp.bump).0 - bj.cos());
    }
    let min_f = f.iter().copied().fold(f64::INFINITY, f64::min);
    let f_end = *f.last().unwrap();
    Ok(CapComparison { b, f, f_prime, min_f, f_end })
}
