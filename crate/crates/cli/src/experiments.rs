//! One function per subcommand. Each returns its files in memory plus the
//! embedded checks; nothing here touches the filesystem.

use std::sync::Arc;

use serde::Serialize;

use capcyl::cylinder::{critical_points, slice_minimality_check};
use capcyl::elliptic::{antisymmetry_defect, shooting_scan, symmetric_solution, tanh_alpha_grid, SolveOptions};
use capcyl::field::DoubleWell;
use capcyl::geometry::{cap_comparison, curvature_report, sphere_volume, SphereMetric, WarpFunction};
use capcyl::io;
use capcyl::minmax::{least_area_scan, sweepout_profile, width_report};
use capcyl::parabolic::{comparison_audit, drift_experiment, frankel_experiment, Direction, FlowOptions};
use capcyl::spectral::{jacobi_spectrum_slice, linearized_spectrum, JacobiReport};

use crate::config::RunConfig;

pub const SUBCOMMANDS: [&str; 11] = [
    "metric",
    "curvature",
    "cap-compare",
    "solve",
    "census",
    "flow-frankel",
    "flow-drift",
    "spectrum",
    "jacobi",
    "width",
    "example-cylinder",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: String,
    pub required: String,
}

impl Check {
    fn at_most(name: &str, measured: f64, limit: f64) -> Self {
        Self { name: name.into(), passed: measured <= limit, measured: format!("{measured:e}"), required: format!("<= {limit:e}") }
    }

    fn at_least(name: &str, measured: f64, limit: f64) -> Self {
        Self { name: name.into(), passed: measured >= limit, measured: format!("{measured:e}"), required: format!(">= {limit:e}") }
    }

    fn equals<T: PartialEq + std::fmt::Display>(name: &str, measured: T, expected: T) -> Self {
        Self { name: name.into(), passed: measured == expected, measured: measured.to_string(), required: format!("== {expected}") }
    }

    fn holds(name: &str, passed: bool, measured: impl Into<String>, required: &str) -> Self {
        Self { name: name.into(), passed, measured: measured.into(), required: required.into() }
    }
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<(String, String)>,
    pub checks: Vec<Check>,
}

impl Outcome {
    fn file(&mut self, name: impl Into<String>, contents: String) {
        self.files.push((name.into(), contents));
    }

    fn check(&mut self, check: Check) {
        self.checks.push(check);
    }
}

type ExpResult = capcyl::Result<Outcome>;

/// Runs one subcommand. A library error becomes a failed `<name>.run` check.
pub fn run(name: &str, cfg: &RunConfig) -> Outcome {
    let result = match name {
        "metric" => metric(cfg),
        "curvature" => curvature(cfg),
        "cap-compare" => cap_compare(),
        "solve" => solve(cfg),
        "census" => census(cfg),
        "flow-frankel" => flow_frankel(cfg),
        "flow-drift" => flow_drift(cfg),
        "spectrum" => spectrum(cfg),
        "jacobi" => jacobi(cfg),
        "width" => width(cfg),
        "example-cylinder" => example_cylinder(),
        other => unreachable!("unknown subcommand {other}"),
    };
    result.unwrap_or_else(|e| Outcome {
        files: Vec::new(),
        checks: vec![Check::holds(&format!("{name}.run"), false, e.to_string(), "completes")],
    })
}

fn build_metric(cfg: &RunConfig) -> capcyl::Result<Arc<SphereMetric>> {
    Ok(Arc::new(SphereMetric::new(cfg.n, cfg.r, cfg.grid_n, WarpFunction::standard()?)?))
}

fn solve_options(cfg: &RunConfig) -> SolveOptions {
    SolveOptions { tolerance: cfg.tolerance, ..Default::default() }
}

fn flow_options(cfg: &RunConfig) -> FlowOptions {
    FlowOptions { dt: cfg.dt, t_end: cfg.t_end, check_monotone: true, snapshot_stride: cfg.snapshot_stride }
}

fn curvature_checks(out: &mut Outcome, m: &SphereMetric) -> String {
    let rep = curvature_report(m);
    out.check(Check::at_least("curvature.ricci_radial_min", rep.min_radial(), -1e-9));
    out.check(Check::at_least("curvature.ricci_tangential_min", rep.min_tangential(), -1e-9));
    out.check(Check::at_least("curvature.scalar_min", rep.min_scalar(), -1e-9));
    let pole = (m.dim - 1) as f64 * 2.0 / (m.a() * m.a());
    out.check(Check::at_most("curvature.pole_value", (rep.ricci_radial[0] - pole).abs(), 1e-6));
    io::curvature_csv(m, &rep)
}

fn metric(cfg: &RunConfig) -> ExpResult {
    let m = build_metric(cfg)?;
    let mut out = Outcome::default();
    out.file("warp.csv", io::warp_csv(&m));
    let csv = curvature_checks(&mut out, &m);
    out.file("curvature.csv", csv);
    Ok(out)
}

fn curvature(cfg: &RunConfig) -> ExpResult {
    let m = build_metric(cfg)?;
    let mut out = Outcome::default();
    let csv = curvature_checks(&mut out, &m);
    out.file("curvature.csv", csv);
    Ok(out)
}

fn cap_compare() -> ExpResult {
    let rep = cap_comparison(&WarpFunction::standard()?, 2048)?;
    let mut out = Outcome::default();
    out.check(Check::at_least("cap.min_f", rep.min_f, -1e-12));
    out.check(Check::at_most("cap.f_end", rep.f_end.abs(), 1e-12));
    let max_fp = rep.f_prime.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    out.check(Check::at_most("cap.max_f_prime", max_fp, 1e-8));
    out.file("cap.csv", io::cap_csv(&rep));
    Ok(out)
}

fn solve(cfg: &RunConfig) -> ExpResult {
    let m = build_metric(cfg)?;
    let opts = solve_options(cfg);
    let mut out = Outcome::default();
    for eps in cfg.solve_epsilons() {
        let v = symmetric_solution(m.clone(), eps, DoubleWell::quartic(), &opts)?;
        out.check(Check::at_most(&format!("solve.eps{eps}.residual"), v.residual_norm, 1e-8));
        out.check(Check::at_most(&format!("solve.eps{eps}.antisymmetry"), antisymmetry_defect(&v.profile.values), 1e-8));
        let zeros = v.zeros();
        let centered = zeros.len() == 1 && (zeros[0] - m.center()).abs() <= m.h();
        out.check(Check::holds(&format!("solve.eps{eps}.center_zero"), centered, format!("{zeros:?}"), "one zero within h of s_c"));
        out.file(format!("solution_eps{eps}.csv"), io::profile_csv(&v.profile));
    }
    Ok(out)
}

fn census(cfg: &RunConfig) -> ExpResult {
    let m = build_metric(cfg)?;
    let grid = tanh_alpha_grid(cfg.alpha_count, 12.0);
    let census = shooting_scan(m.clone(), cfg.epsilon, DoubleWell::quartic(), &grid, &solve_options(cfg))?;
    let mut out = Outcome::default();
    out.check(Check::at_least("census.members", census.members.len() as f64, 1.0));
    let report = least_area_scan(&census.members, &m)?;
    let offset = report.max_single_layer_offset.unwrap_or(0.0);
    out.check(Check::at_most("census.single_layer_offset", offset, 2.0 * m.h()));
    out.check(Check::holds(
        "census.least_area",
        !report.any_below,
        format!("{:?}", report.min_area),
        "no interface below the central slice",
    ));
    let (checked, failed) = comparison_audit(&census.members);
    out.check(Check::equals("census.comparison_failures", failed, 0));
    out.check(Check::holds("census.comparison_checked", checked > 0, checked.to_string(), "> 0"));
    out.file("census.json", io::census_json(&census.members));
    Ok(out)
}

fn flow_frankel(cfg: &RunConfig) -> ExpResult {
    let m = build_metric(cfg)?;
    let eps = cfg.epsilon;
    let res = frankel_experiment(
        m,
        eps,
        DoubleWell::quartic(),
        cfg.theta_fraction,
        Direction::Up,
        &flow_options(cfg),
        &solve_options(cfg),
    )?;
    let mut out = Outcome::default();
    out.check(Check::at_least("frankel.subsolution", res.min_initial_residual, -1e-10));
    out.check(Check::at_least("frankel.monotone", res.trace.min_increment, -1e-10));
    out.check(Check::at_most("frankel.final_distance", res.final_distance, 1e-4));
    let meta = [
        ("epsilon", io::fmt_num(eps)),
        ("lambda1", io::fmt_num(res.lambda1)),
        ("theta", io::fmt_num(res.theta)),
        ("final_distance", io::fmt_num(res.final_distance)),
    ];
    out.file("frankel_trace.csv", io::flow_trace_csv(&res.trace, &meta));
    Ok(out)
}

fn flow_drift(cfg: &RunConfig) -> ExpResult {
    let m = build_metric(cfg)?;
    let res = drift_experiment(m, cfg.epsilon, DoubleWell::quartic(), cfg.drift_offset, &flow_options(cfg))?;
    let mut out = Outcome::default();
    out.check(Check::holds(
        "drift.interface_retained",
        res.interface_lost.is_none(),
        format!("{:?}", res.interface_lost),
        "interface present at the end",
    ));
    out.check(Check::at_most("drift.energy_increase", res.trace.max_energy_increase, 1e-10));
    out.check(Check::at_least("drift.reduction", res.reduction().unwrap_or(f64::NEG_INFINITY), 0.5));
    let meta = [
        ("epsilon", io::fmt_num(cfg.epsilon)),
        ("offset", io::fmt_num(cfg.drift_offset)),
        ("initial_distance", io::fmt_num(res.initial_distance)),
        ("final_distance", res.final_distance.map(io::fmt_num).unwrap_or_default()),
    ];
    out.file("drift_trace.csv", io::flow_trace_csv(&res.trace, &meta));
    Ok(out)
}

fn spectrum(cfg: &RunConfig) -> ExpResult {
    let m = build_metric(cfg)?;
    let v = symmetric_solution(m, cfg.epsilon, DoubleWell::quartic(), &solve_options(cfg))?;
    let rep = linearized_spectrum(&v.profile, 6, 4)?;
    let mut out = Outcome::default();
    out.check(Check::equals("spectrum.index_plus_nullity", rep.index + rep.nullity, 1));
    out.check(Check::holds("spectrum.certified", rep.certify().is_ok(), format!("{:?}", rep.truncation), "top mode clears the null band"));
    let mode1 = rep.lowest(1).unwrap_or(f64::NAN);
    out.check(Check::holds("spectrum.mode1_lowest", mode1 > 0.0, format!("{mode1:e}"), "> 0"));
    out.file("spectrum.json", io::spectral_json(&rep));
    Ok(out)
}

fn jacobi(cfg: &RunConfig) -> ExpResult {
    let m = build_metric(cfg)?;
    let (lo, hi) = m.plateau();
    let reports = [lo, m.center(), hi]
        .into_iter()
        .map(|s| jacobi_spectrum_slice(&m, s, 4))
        .collect::<capcyl::Result<Vec<JacobiReport>>>()?;
    let mut out = Outcome::default();
    let n1 = (m.dim - 1) as f64;
    for rep in &reports {
        let tag = format!("jacobi.s{}", rep.s);
        out.check(Check::equals(&format!("{tag}.index"), rep.index, 0));
        out.check(Check::equals(&format!("{tag}.nullity"), rep.nullity, 1));
        out.check(Check::equals(&format!("{tag}.second_eigenvalue"), rep.levels[1].eigenvalue, n1));
    }
    out.file("jacobi.json", io::to_json(&reports));
    Ok(out)
}

fn width(cfg: &RunConfig) -> ExpResult {
    let m = build_metric(cfg)?;
    let samples = 2049;
    let sweep = sweepout_profile(&m, samples)?;
    let mut out = Outcome::default();
    out.check(Check::at_most("width.max_mass", (sweep.max_mass - sphere_volume(m.dim - 1)).abs(), 1e-10));
    let cell = m.total_length() / (samples - 1) as f64;
    let (lo, hi) = m.plateau();
    let argmax_err = (sweep.argmax.0 - lo).abs().max((sweep.argmax.1 - hi).abs());
    out.check(Check::at_most("width.argmax", argmax_err, cell));

    let well = DoubleWell::quartic();
    let opts = solve_options(cfg);
    let energies = cfg
        .schedule_or_default()
        .into_iter()
        .map(|eps| symmetric_solution(m.clone(), eps, well, &opts).map(|v| (eps, v.energy)))
        .collect::<capcyl::Result<Vec<(f64, f64)>>>()?;
    let rep = width_report(&m, &well, &energies)?;
    out.check(Check::holds(
        "width.converging",
        rep.converging,
        format!("{:?}", rep.energy_table.iter().map(|r| r.ratio).collect::<Vec<_>>()),
        "|ratio - 1| strictly decreasing in epsilon",
    ));
    out.file("sweepout.csv", io::sweepout_csv(&sweep));
    out.file("width.json", io::width_json(&rep));
    Ok(out)
}

fn example_cylinder() -> ExpResult {
    let res = 1e-5;
    let pos = critical_points((0.05, 0.8), res)?;
    let neg = critical_points((-0.8, -0.05), res)?;
    let mut out = Outcome::default();
    let sorted = pos.windows(2).all(|w| w[0].t_star > w[1].t_star);
    out.check(Check::holds("cylinder.sorted", sorted, pos.len().to_string(), "strictly decreasing"));
    let worst = pos.iter().map(|p| slice_minimality_check(p.t_star)).fold(0.0, f64::max);
    out.check(Check::at_most("cylinder.max_f_prime", worst, 1e-10));
    let degenerate = pos.iter().filter(|p| !p.nondegenerate).count();
    out.check(Check::equals("cylinder.degenerate", degenerate, 0));
    let closest = pos
        .iter()
        .flat_map(|p| neg.iter().map(move |q| (p.t_star + q.t_star).abs()))
        .fold(f64::INFINITY, f64::min);
    out.check(Check::holds("cylinder.mirror_gap", closest > 1e-6, format!("{closest:e}"), "> 1e-6"));
    out.file("cylinder.csv", io::cylinder_csv(&pos));
    Ok(out)
}
