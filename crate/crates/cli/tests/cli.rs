use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn capcyl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_capcyl")).args(args).output().expect("binary runs")
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn file_names(m: &Value) -> BTreeSet<String> {
    m["files"].as_array().unwrap().iter().map(|f| f["name"].as_str().unwrap().to_string()).collect()
}

fn check<'a>(m: &'a Value, name: &str) -> &'a Value {
    m["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap_or_else(|| panic!("no check {name}"))
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Small, fast configuration under which every flow converges.
const FAST: &str = "n = 3\nR_minus_a = 1\ngrid_N = 129\nepsilon = 0.5\nepsilon_schedule = \"0.4,0.2,0.1\"\ndt = 0.125\nt_end = 1e5\nsnapshot_stride = 1000\nalpha_count = 100\ndrift_offset = 0.3\n";

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.cfg");
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn metric_lists_files_with_digests() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("out");
    let out = capcyl(&["metric", "--n", "3", "--r", "3", "--grid", "257", "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let m = manifest(&out_dir);
    assert_eq!(file_names(&m), BTreeSet::from(["curvature.csv".to_string(), "warp.csv".to_string()]));
    for f in m["files"].as_array().unwrap() {
        let bytes = std::fs::read(out_dir.join(f["name"].as_str().unwrap())).unwrap();
        assert_eq!(f["sha256"].as_str().unwrap(), hex::encode(Sha256::digest(&bytes)));
        assert_eq!(f["bytes"].as_u64().unwrap() as usize, bytes.len());
    }
    assert_eq!(check(&m, "curvature.ricci_radial_min")["passed"], true);
    assert_eq!(m["passed"], true);
    assert_eq!(m["config"]["grid_N"], 257);
    assert!(m["version"].is_string());
    assert!(m["wall_time_s"].as_f64().unwrap() >= 0.0);

    let text = std::fs::read_to_string(out_dir.join("curvature.csv")).unwrap();
    let (meta, header, rows) = capcyl::io::parse_csv(&text).unwrap();
    assert_eq!(header, ["s", "w", "w_prime", "w_second", "ricci_radial", "ricci_tangential", "scalar"]);
    assert_eq!(rows.len(), 257);
    assert!(meta.contains(&("n".to_string(), "3".to_string())));
}

#[test]
fn cap_compare_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = capcyl(&["cap-compare", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let m = manifest(tmp.path());
    let c = check(&m, "cap.min_f");
    assert_eq!(c["passed"], true);
    assert!(c["measured"].as_str().unwrap().parse::<f64>().unwrap() >= -1e-12);
}

#[test]
fn config_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().to_str().unwrap();

    let out = capcyl(&["bogus", "--out", dir]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown subcommand"));

    let out = capcyl(&["metric", "--grid", "512", "--out", dir]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("grid_N"));

    let cfg = write_config(tmp.path(), "n = 3\n\nthis is not a pair\n");
    let out = capcyl(&["metric", "--config", &cfg, "--out", dir]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));

    let out = capcyl(&["metric", "--eps-schedule", "0.3,0.6", "--out", dir]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("epsilon_schedule"));

    let out = capcyl(&["--out", dir]);
    assert_eq!(out.status.code(), Some(2));

    let out = capcyl(&["metric", "--config", tmp.path().join("missing.cfg").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!tmp.path().join("manifest.json").exists());
}

#[test]
fn flags_override_file() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("o");
    let cfg = write_config(tmp.path(), &format!("grid_N = 129\nexperiment = jacobi\nseed = 3\nout_dir = {}\n", out_dir.display()));
    let out = capcyl(&["--config", &cfg, "--grid", "257", "--n", "5"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let m = manifest(&out_dir);
    assert_eq!(m["subcommand"], "jacobi");
    assert_eq!(m["config"]["grid_N"], 257);
    assert_eq!(m["config"]["n"], 5);
    assert_eq!(m["config"]["seed"], 3);
    let seconds: Vec<&Value> =
        m["checks"].as_array().unwrap().iter().filter(|c| c["name"].as_str().unwrap().ends_with("second_eigenvalue")).collect();
    assert_eq!(seconds.len(), 3);
    assert!(seconds.iter().all(|c| c["measured"] == "4" && c["passed"] == true));
}

#[test]
fn solve_writes_one_profile_per_epsilon() {
    let tmp = tempfile::tempdir().unwrap();
    let out = capcyl(&["solve", "--grid", "257", "--eps-schedule", "1.2,0.6", "--out", tmp.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let m = manifest(tmp.path());
    assert_eq!(file_names(&m), BTreeSet::from(["solution_eps0.6.csv".to_string(), "solution_eps1.2.csv".to_string()]));
    let text = std::fs::read_to_string(tmp.path().join("solution_eps0.6.csv")).unwrap();
    let (meta, header, rows) = capcyl::io::parse_csv(&text).unwrap();
    assert_eq!(header, ["s", "u"]);
    assert_eq!(rows.len(), 257);
    assert!(meta.iter().any(|(k, v)| k == "epsilon" && v.parse::<f64>().unwrap() == 0.6));
}

#[test]
fn failing_check_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    // the default horizon of 50 eps^2 is far too short to reach +1
    let out = capcyl(&["flow-frankel", "--grid", "129", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("frankel.final_distance"));
    let m = manifest(tmp.path());
    assert_eq!(m["passed"], false);
    assert_eq!(check(&m, "frankel.final_distance")["passed"], false);
    assert!(tmp.path().join("frankel_trace.csv").exists());
}

#[test]
fn frankel_converges_with_long_horizon() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), FAST);
    let out = capcyl(&["flow-frankel", "--config", &cfg, "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = std::fs::read_to_string(tmp.path().join("o/frankel_trace.csv")).unwrap();
    let (meta, header, rows) = capcyl::io::parse_csv(&text).unwrap();
    assert_eq!(header, ["t", "interface_s", "energy", "min_step_increment"]);
    assert!(rows.windows(2).all(|p| p[1][2] <= p[0][2]));
    assert!(meta.iter().any(|(k, _)| k == "lambda1"));
}

#[test]
fn runs_are_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), FAST);
    let digests: Vec<Value> = ["a", "b"]
        .iter()
        .map(|d| {
            let dir = tmp.path().join(d);
            capcyl(&["census", "--config", &cfg, "--seed", "11", "--out", dir.to_str().unwrap()]);
            manifest(&dir)["files"].clone()
        })
        .collect();
    assert_eq!(digests[0], digests[1]);
    assert!(!digests[0].as_array().unwrap().is_empty());
}

#[test]
fn all_is_the_union_of_subcommands() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), FAST);
    let mut union = BTreeSet::new();
    let mut checks = 0;
    for sub in [
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
    ] {
        let dir = tmp.path().join(sub);
        let out = capcyl(&[sub, "--config", &cfg, "--out", dir.to_str().unwrap()]);
        assert!(matches!(out.status.code(), Some(0 | 1)), "{sub}: {}", stderr(&out));
        let m = manifest(&dir);
        assert!(!m["checks"].as_array().unwrap().is_empty(), "{sub}");
        checks += m["checks"].as_array().unwrap().len();
        union.extend(file_names(&m));
    }
    let dir = tmp.path().join("all");
    let out = capcyl(&["all", "--config", &cfg, "--out", dir.to_str().unwrap()]);
    let m = manifest(&dir);
    assert_eq!(file_names(&m), union);
    // curvature checks run in both metric and curvature
    assert_eq!(m["checks"].as_array().unwrap().len(), checks);
    let all_passed = m["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true);
    assert_eq!(m["passed"], all_passed);
    assert_eq!(out.status.code(), Some(if all_passed { 0 } else { 1 }));

    for name in &union {
        let a = std::fs::read(dir.join(name)).unwrap();
        let sub_dir = std::fs::read_dir(tmp.path())
            .unwrap()
            .map(|e| e.unwrap().path())
            .find(|p| p.join(name).exists() && p.file_name().unwrap() != "all")
            .unwrap();
        assert_eq!(a, std::fs::read(sub_dir.join(name)).unwrap(), "{name}");
    }
}
