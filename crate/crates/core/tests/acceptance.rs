//! Acceptance criteria A1–A11, one line each. Exits nonzero if any fails.
//!
//! Run with `cargo test --release -p capcyl --test acceptance`.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use capcyl::cylinder::{critical_points, slice_minimality_check};
use capcyl::elliptic::{
    antisymmetry_defect, newton_solve, shooting_scan, symmetric_solution, tanh_alpha_grid, SolutionRecord,
    SolveOptions,
};
use capcyl::field::{heteroclinic_jet, sigma_energy, DoubleWell, RadialProfile};
use capcyl::geometry::{cap_comparison, curvature_report, solve_bump_constant};
use capcyl::minmax::sweepout_profile;
use capcyl::parabolic::{drift_experiment, frankel_experiment, Direction, FlowOptions};
use capcyl::spectral::{jacobi_spectrum_slice, linearized_spectrum};
use common::{bump, integrate, metric, warp};

const PI: f64 = std::f64::consts::PI;

/// Failed sub-checks and informational notes for one criterion.
#[derive(Default)]
struct Checks {
    failed: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failed.push(what.into());
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }

    fn within(&mut self, elapsed: Duration, limit_s: f64) {
        let secs = elapsed.as_secs_f64();
        self.note(format!("{secs:.2}s"));
        self.check(secs < limit_s, format!("runtime {secs:.2}s >= {limit_s}s"));
    }
}

fn quartic() -> DoubleWell {
    DoubleWell::quartic()
}

/// vol(Sᵏ) = 2π^((k+1)/2) / Γ((k+1)/2).
fn unit_sphere_volume(k: usize) -> f64 {
    let half = k + 1;
    // Γ(half/2) by the recursion from Γ(1/2) = √π, Γ(1) = 1
    let mut gamma = if half.is_multiple_of(2) { 1.0 } else { PI.sqrt() };
    let mut x = if half.is_multiple_of(2) { 1.0 } else { 0.5 };
    while x + 1e-9 < half as f64 / 2.0 {
        gamma *= x;
        x += 1.0;
    }
    2.0 * PI.powf(half as f64 / 2.0) / gamma
}

/// f′ written out independently of the library.
fn cylinder_derivative(t: f64) -> f64 {
    let s = (2.0 * PI / t).sin();
    let c = (2.0 * PI / t).cos();
    6.0 * t.powi(5) * (s + 1.0) - 2.0 * PI * t.powi(4) * c
}

fn sign_scan_roots(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    let mut roots = Vec::new();
    let mut prev = cylinder_derivative(lo);
    for i in 1..=n {
        let t = lo + i as f64 * step;
        let cur = cylinder_derivative(t);
        if prev.signum() != cur.signum() {
            roots.push(t - 0.5 * step);
        }
        prev = cur;
    }
    roots
}

fn a1() -> Checks {
    let mut c = Checks::default();
    let start = Instant::now();
    let bp = solve_bump_constant(1e-10).expect("bump constant");
    let elapsed = start.elapsed();
    let a = bp.a;
    c.note(format!("a = {a:.10}"));
    c.check((a - 1.65714).abs() <= 5e-5, format!("|a - 1.65714| = {:e}", (a - 1.65714).abs()));
    let mass = integrate(|x| bump(x, a), 0.0, a, 400);
    c.check((mass - 1.0).abs() <= 1e-9, format!("re-integration residual {:e}", (mass - 1.0).abs()));
    c.within(elapsed, 1.0);
    c
}

fn a2() -> Checks {
    let mut c = Checks::default();
    let start = Instant::now();
    let a = 1.0 / integrate(|y| bump(y, 1.0), 0.0, 1.0, 400);
    for n in [3, 4, 7] {
        let m = metric(n, 3.0, 4097);
        let rep = curvature_report(&m);
        c.check(rep.min_radial() >= -1e-9, format!("n={n} min radial Ricci {:e}", rep.min_radial()));
        c.check(rep.min_tangential() >= -1e-9, format!("n={n} min tangential Ricci {:e}", rep.min_tangential()));
        c.check(rep.min_scalar() >= -1e-9, format!("n={n} min scalar {:e}", rep.min_scalar()));
        let target = (n - 1) as f64 * 2.0 / (a * a);
        let last = m.nodes() - 1;
        for i in [0, last] {
            for (name, v) in [("radial", rep.ricci_radial[i]), ("tangential", rep.ricci_tangential[i])] {
                c.check((v - target).abs() <= 1e-6, format!("n={n} node {i} {name} pole value {v} vs {target}"));
            }
        }
    }
    c.within(start.elapsed(), 5.0);
    c
}

fn a3() -> Checks {
    let mut c = Checks::default();
    let start = Instant::now();
    let w = warp();
    let rep = cap_comparison(&w, 2048).expect("cap comparison");
    let elapsed = start.elapsed();
    let max_fp = rep.f_prime.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    c.note(format!("min f {:e}, max f' {:e}", rep.min_f, max_fp));
    c.check(rep.b.len() == 2048, "sample count");
    c.check(rep.min_f >= -1e-12, format!("min f {:e}", rep.min_f));
    c.check(rep.f_end.abs() <= 1e-12, format!("|f(pi/2)| {:e}", rep.f_end));
    c.check(max_fp <= 1e-8, format!("max f' {:e}", max_fp));
    let a = w.a();
    for j in (0..2048).step_by(256) {
        let b = rep.b[j];
        let upper = a - 0.5 * PI + b;
        let oracle = integrate(|x| bump(x, a), 0.0, upper, 200) - b.sin();
        c.check((rep.f[j] - oracle).abs() <= 1e-9, format!("f({b}) = {} vs quadrature {oracle}", rep.f[j]));
    }
    c.within(elapsed, 1.0);
    c
}

fn a4() -> Checks {
    let mut c = Checks::default();
    let q = quartic();
    let sigma = sigma_energy(&q);
    let exact = 2f64.sqrt() / 3.0;
    c.check((sigma - exact).abs() <= 1e-10, format!("|sigma - sqrt2/3| = {:e}", (sigma - exact).abs()));
    let mut worst: f64 = 0.0;
    for eps in [1.0, 0.6, 0.3] {
        for j in 0..100 {
            let t = eps * (-6.0 + 12.0 * j as f64 / 99.0);
            let (u, _, u2) = heteroclinic_jet(t, eps, &q).unwrap();
            // W = (1 − u²)²/4, W′ = u³ − u
            worst = worst.max((u2 - (u * u * u - u) / (eps * eps)).abs());
        }
    }
    c.note(format!("ODE residual {worst:e}"));
    c.check(worst <= 1e-12, format!("heteroclinic residual {worst:e}"));
    for eps in [1.0, 0.3] {
        let e = integrate(
            |t| {
                let (u, du, _) = heteroclinic_jet(t, eps, &q).unwrap();
                0.5 * eps * du * du + 0.25 * (1.0 - u * u).powi(2) / eps
            },
            -40.0 * eps,
            40.0 * eps,
            800,
        );
        c.check((e - 2.0 * exact).abs() <= 1e-6, format!("eps={eps} layer energy {e} vs {}", 2.0 * exact));
    }
    c
}

fn a5() -> Checks {
    let mut c = Checks::default();
    let start = Instant::now();
    let m = metric(3, 3.0, 1025);
    let scale = 2.0 * (2f64.sqrt() / 3.0) * 4.0 * PI;
    let mut ratios = Vec::new();
    for eps in [1.2, 0.6, 0.3] {
        let v = match symmetric_solution(m.clone(), eps, quartic(), &SolveOptions::default()) {
            Ok(v) => v,
            Err(e) => {
                c.check(false, format!("eps={eps} solve failed: {e}"));
                continue;
            }
        };
        c.check(v.residual_norm <= 1e-8, format!("eps={eps} residual {:e}", v.residual_norm));
        let defect = antisymmetry_defect(&v.profile.values);
        c.check(defect <= 1e-8, format!("eps={eps} antisymmetry {defect:e}"));
        let zeros = v.zeros();
        c.check(
            zeros.len() == 1 && (zeros[0] - m.center()).abs() <= m.h(),
            format!("eps={eps} zeros {zeros:?} vs center {}", m.center()),
        );
        let ratio = v.energy / scale;
        c.note(format!("ratio({eps}) = {ratio:.8}"));
        ratios.push((eps, ratio));
    }
    if let [_, (_, r6), (_, r3)] = ratios[..] {
        c.check((r3 - 1.0).abs() <= 0.1, format!("ratio at 0.3 = {r3}"));
        c.check(
            (r3 - 1.0).abs() < (r6 - 1.0).abs(),
            format!("|ratio-1| at 0.3 = {:e} not below {:e} at 0.6", (r3 - 1.0).abs(), (r6 - 1.0).abs()),
        );
    }
    c.within(start.elapsed(), 30.0);
    c
}

fn a6() -> Checks {
    let mut c = Checks::default();
    let m = metric(3, 3.0, 1025);
    let eps = 0.3;
    let v = symmetric_solution(m.clone(), eps, quartic(), &SolveOptions::default()).expect("v_eps");
    let rep = linearized_spectrum(&v.profile, 6, 4).expect("spectrum");
    let l0 = rep.lowest(0).unwrap();
    let l1 = rep.lowest(1).unwrap();
    c.note(format!("lambda(0) = {l0:e}, lambda(1) = {l1:e}, band {:e}", rep.null_tolerance));
    c.check(rep.index == 1, format!("index {}", rep.index));
    c.check(rep.nullity == 0, format!("nullity {}", rep.nullity));
    c.check(rep.negative_count() == 1 && l0 < 0.0, format!("negative count {}", rep.negative_count()));
    c.check(l1 > 0.0, format!("mode-1 lowest {l1:e}"));

    let constant = |value: f64| {
        let u = RadialProfile::constant(m.clone(), eps, quartic(), value).unwrap();
        linearized_spectrum(&u, 6, 4).unwrap()
    };
    let (plus, minus, zero) = (constant(1.0), constant(-1.0), constant(0.0));
    // mode 0 of a constant has the constant ground state: λ = W″(c)/ε²
    for (name, rep, target) in [("+1", &plus, 2.0), ("-1", &minus, 2.0), ("0", &zero, -1.0)] {
        let target = target / (eps * eps);
        let got = rep.lowest(0).unwrap();
        c.check((got - target).abs() <= 1e-6 * target.abs(), format!("u={name} mode-0 {got} vs {target}"));
    }
    // every other eigenvalue shifts by the change in W″/ε²
    for (k, (p, z)) in plus.modes.iter().zip(&zero.modes).enumerate() {
        for (x, y) in p.eigenvalues.iter().zip(&z.eigenvalues) {
            let shift = x - y;
            let target = 3.0 / (eps * eps);
            c.check((shift - target).abs() <= 1e-6 * x.abs(), format!("mode {k} shift {shift} vs {target}"));
        }
    }
    for (p, n) in plus.modes.iter().zip(&minus.modes) {
        c.check(p.eigenvalues == n.eigenvalues, format!("mode {} differs between +1 and -1", p.k));
    }
    c
}

fn a7() -> Checks {
    let mut c = Checks::default();
    for n in [3, 4, 7] {
        let m = metric(n, 3.0, 1025);
        let (lo, hi) = m.plateau();
        for j in 0..=100 {
            let s = if j == 100 { hi } else { lo + (hi - lo) * j as f64 / 100.0 };
            match jacobi_spectrum_slice(&m, s, 4) {
                Ok(rep) => {
                    c.check(rep.index == 0, format!("n={n} s={s} index {}", rep.index));
                    c.check(rep.nullity == 1, format!("n={n} s={s} nullity {}", rep.nullity));
                    c.check(
                        rep.levels[1].eigenvalue == (n - 1) as f64,
                        format!("n={n} s={s} second eigenvalue {}", rep.levels[1].eigenvalue),
                    );
                }
                Err(e) => c.check(false, format!("n={n} s={s}: {e}")),
            }
        }
    }
    c
}

fn a8() -> Checks {
    let mut c = Checks::default();
    for n in [3, 4, 7] {
        let m = metric(n, 3.0, 1025);
        let samples = 4097;
        let p = sweepout_profile(&m, samples).expect("sweepout");
        let target = unit_sphere_volume(n - 1);
        c.check((p.max_mass - target).abs() <= 1e-10, format!("n={n} max mass {} vs {target}", p.max_mass));
        let cell = m.total_length() / (samples - 1) as f64;
        let a = m.a();
        let far = m.total_length() - a;
        c.check(
            (p.argmax.0 - a).abs() <= cell && (p.argmax.1 - far).abs() <= cell,
            format!("n={n} argmax {:?} vs [{a}, {far}]", p.argmax),
        );
    }
    c
}

fn a9() -> Checks {
    let mut c = Checks::default();
    let start = Instant::now();
    let eps = 0.6;
    let r = 3.0;
    let m = metric(3, r, 1025);
    let center = m.center();
    let opts = SolveOptions::default();
    let v = symmetric_solution(m.clone(), eps, quartic(), &opts).expect("v_eps");

    let seed = RadialProfile::layer(m.clone(), eps, quartic(), 0.3 * r).unwrap();
    match newton_solve(&seed, &opts) {
        Ok(sol) => {
            let zeros = sol.zeros();
            let dist = sol.profile.sup_distance(&v.profile);
            c.note(format!("newton sup-distance {dist:e}"));
            c.check(zeros.len() == 1 && (zeros[0] - center).abs() <= m.h(), format!("newton zeros {zeros:?}"));
            c.check(dist <= 1e-6, format!("newton sup-distance {dist:e}"));
        }
        Err(e) => c.check(false, format!("newton from offset failed: {e}")),
    }

    match drift_experiment(m.clone(), eps, quartic(), 0.3 * r, &FlowOptions::default()) {
        Ok(d) => {
            let reduction = d.reduction();
            c.note(format!("drift {:.4} -> {:?}", d.initial_distance, d.final_distance));
            c.check(matches!(reduction, Some(x) if x >= 0.5), format!("drift reduction {reduction:?}"));
        }
        Err(e) => c.check(false, format!("drift failed: {e}")),
    }

    match shooting_scan(m.clone(), eps, quartic(), &tanh_alpha_grid(400, 12.0), &opts) {
        Ok(census) => {
            let singles: Vec<&SolutionRecord> = census.members.iter().filter(|s| s.zeros().len() == 1).collect();
            c.note(format!("census {} members, {} single-layer", census.members.len(), singles.len()));
            for s in singles {
                let z = s.zeros()[0];
                c.check((z - center).abs() <= 2.0 * m.h(), format!("single layer at {z}, center {center}"));
            }
        }
        Err(e) => c.check(false, format!("census failed: {e}")),
    }
    c.within(start.elapsed(), 120.0);
    c
}

fn a10() -> Checks {
    let mut c = Checks::default();
    let eps = 0.6;
    let m = metric(3, 3.0, 257);
    let flow = FlowOptions {
        dt: Some(0.5 * eps * eps),
        t_end: Some(1e7),
        check_monotone: true,
        snapshot_stride: 1_000_000,
    };
    match frankel_experiment(m, eps, quartic(), 0.5, Direction::Up, &flow, &SolveOptions::default()) {
        Ok(out) => {
            c.note(format!(
                "lambda1 {:e}, theta {:e}, t = {:.3e}, sup|u-1| = {:e}",
                out.lambda1,
                out.theta,
                out.trace.final_time(),
                out.final_distance
            ));
            c.check(out.min_initial_residual >= -1e-10, format!("min initial residual {:e}", out.min_initial_residual));
            c.check(out.trace.min_increment >= -1e-10, format!("min step increment {:e}", out.trace.min_increment));
            c.check(out.final_distance <= 1e-4, format!("final sup|u-1| {:e}", out.final_distance));
        }
        Err(e) => c.check(false, format!("frankel failed: {e}")),
    }
    c
}

fn a11() -> Checks {
    let mut c = Checks::default();
    let res = 1e-5;
    let pos = critical_points((0.05, 0.8), res).expect("positive roots");
    let neg = critical_points((-0.8, -0.05), res).expect("negative roots");
    c.note(format!("{} positive, {} negative", pos.len(), neg.len()));
    c.check(pos.iter().all(|p| p.t_star > 0.0), "non-positive member");
    c.check(pos.windows(2).all(|w| w[0].t_star > w[1].t_star), "not strictly decreasing");
    let worst = pos.iter().map(|p| slice_minimality_check(p.t_star)).fold(0.0, f64::max);
    c.check(worst <= 1e-10, format!("max |f'| {worst:e}"));
    for p in pos.iter().rev().take(5) {
        c.check(p.nondegenerate && p.f_second.abs() > 1e-8, format!("t={} degenerate", p.t_star));
        c.check(p.sin_value >= 0.5, format!("t={} sin {:.4}", p.t_star, p.sin_value));
    }
    for p in &pos {
        for q in &neg {
            let gap = (p.t_star + q.t_star).abs();
            c.check(gap > 1e-6, format!("t={} mirrors {} within {gap:e}", p.t_star, q.t_star));
        }
    }
    for (found, (lo, hi)) in [(&pos, (0.05, 0.8)), (&neg, (-0.8, -0.05))] {
        let mut oracle = sign_scan_roots(lo, hi, 1e-6);
        oracle.sort_by(|x, y| y.abs().total_cmp(&x.abs()));
        c.check(oracle.len() == found.len(), format!("oracle {} roots vs {}", oracle.len(), found.len()));
        for (o, p) in oracle.iter().zip(found.iter()) {
            c.check((o - p.t_star).abs() <= 1e-6, format!("root {} vs oracle {o}", p.t_star));
        }
    }
    c
}

type Criterion = (&'static str, &'static str, fn() -> Checks);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("A1", "bump constant", a1),
        ("A2", "curvature", a2),
        ("A3", "cap comparison", a3),
        ("A4", "heteroclinic and sigma", a4),
        ("A5", "symmetric solution", a5),
        ("A6", "index and nullity", a6),
        ("A7", "slice Jacobi", a7),
        ("A8", "width profile", a8),
        ("A9", "rigidity corroboration", a9),
        ("A10", "Frankel mechanics", a10),
        ("A11", "example cylinder", a11),
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failures = 0;
    for (id, name, run) in criteria {
        if !only.is_empty() && !only.iter().any(|o| o == id) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(c) if c.failed.is_empty() => {
                println!("{id:<4} PASS  {name} ({secs:.2}s) {}", c.notes.join("; "));
            }
            Ok(c) => {
                failures += 1;
                println!("{id:<4} FAIL  {name} ({secs:.2}s) {}", c.notes.join("; "));
                for f in c.failed.iter().take(8) {
                    println!("        - {f}");
                }
                if c.failed.len() > 8 {
                    println!("        - ... {} more", c.failed.len() - 8);
                }
            }
            Err(_) => {
                failures += 1;
                println!("{id:<4} FAIL  {name} ({secs:.2}s) panicked");
            }
        }
    }
    println!("acceptance: {failures} failed");
    if failures == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
