//! End-to-end checks of the `cq` binary: flag parsing, exit codes, config
//! merging, format determinism, and the golden sweep file.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn cq() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cq"))
}

fn run(args: &[&str]) -> Output {
    cq().args(args).output().expect("cq runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cq-cli-test-{name}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn tf_json_matches_closed_forms() {
    let out = run(&["tf", "--dim", "1", "--rho", "0.5", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["energy"], serde_json::json!(-0.09375));
    assert_eq!(v["multiplier"], serde_json::json!(-0.1875));
    assert_eq!(v["plateau_radius"], serde_json::json!(0.6666666666666666));
}

#[test]
fn tf_rejects_unknown_existence_region() {
    let out = run(&["tf", "--dim", "2", "--rho", "0.8"]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(msg.contains("TF existence unknown"), "stderr: {msg}");
}

#[test]
fn solve_rejects_supercritical_density() {
    let out = run(&["solve", "--dim", "1", "--rho", "0.9", "--L", "4", "--n", "256"]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(msg.contains("3/4"), "diagnostic must name the rho <= 3/4 restriction: {msg}");
}

#[test]
fn unknown_flag_exits_two() {
    let out = run(&["tf", "--dim", "1", "--rho", "0.5", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_required_parameter_exits_two() {
    let out = run(&["solve", "--dim", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_threads_env_exits_two() {
    let out = cq()
        .args(["sweep-thermo", "--dim", "1", "--rho", "0.5", "--L", "4,8,16", "--n", "64"])
        .env("CQ_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn threads_env_caps_parallel_rows() {
    let out = cq()
        .args([
            "sweep-thermo", "--dim", "1", "--rho", "0.5", "--L", "4,8,16", "--n", "512",
            "--warm-start", "false", "--format", "json",
        ])
        .env("CQ_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn non_convergence_exits_three() {
    let out = run(&[
        "solve", "--dim", "1", "--rho", "0.5", "--L", "8", "--n", "256", "--max-iter", "2",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let msg = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(msg.contains("no convergence"), "stderr: {msg}");
}

#[test]
fn unwritable_output_exits_two() {
    let out = run(&[
        "tf", "--dim", "1", "--rho", "0.5", "--out", "/nonexistent-dir/x/y.json",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tmp_dir("config");
    let cfg = dir.join("run.json");
    std::fs::write(&cfg, r#"{"dim": 1, "rho": 0.5, "format": "json"}"#).unwrap();
    // Config alone.
    let out = cq().args(["tf", "--config", cfg.to_str().unwrap()]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["rho"], serde_json::json!(0.5));
    // Flag overrides the file.
    let out = cq()
        .args(["tf", "--config", cfg.to_str().unwrap(), "--rho", "0.25"])
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["rho"], serde_json::json!(0.25));
}

#[test]
fn malformed_config_exits_two() {
    let dir = tmp_dir("badconfig");
    let cfg = dir.join("run.json");
    std::fs::write(&cfg, r#"{"dim": 1, "rhoo": 0.5}"#).unwrap();
    let out = cq()
        .args(["tf", "--config", cfg.to_str().unwrap(), "--rho", "0.5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

fn small_sweep_args(out_path: &Path) -> Vec<String> {
    [
        "sweep-thermo", "--dim", "1", "--rho", "0.5", "--L", "4,8,16", "--n", "512", "--out",
    ]
    .iter()
    .map(|s| s.to_string())
    .chain([out_path.to_str().unwrap().to_string()])
    .collect()
}

#[test]
fn sweep_csv_header_is_pinned() {
    let dir = tmp_dir("header");
    let path = dir.join("sweep.csv");
    let out = cq().args(small_sweep_args(&path)).output().unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with(
        "L,eps,energy,energy_gap,mu,mu_gap,kinetic,linf_err_interior,tail_probe,laplacian_sup,iterations,residual\n"
    ));
    assert!(!text.contains('\r'), "line endings must be LF");
}

#[test]
fn sweep_output_matches_golden_file() {
    // Frozen output of the first implementation run; guards byte-level
    // regressions of both the numerics and the serialization.
    let dir = tmp_dir("golden");
    let path = dir.join("sweep.csv");
    let out = cq().args(small_sweep_args(&path)).output().unwrap();
    assert!(out.status.success());
    let got = std::fs::read_to_string(&path).unwrap();
    let want = include_str!("golden/sweep_small.csv");
    assert_eq!(got, want, "sweep output drifted from the golden file");
}

#[test]
fn sweep_json_rows_mirror_csv_headers() {
    let out = run(&[
        "sweep-thermo", "--dim", "1", "--rho", "0.5", "--L", "4,8,16", "--n", "512", "--format",
        "json",
    ]);
    assert!(out.status.success());
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for key in [
        "L", "eps", "energy", "energy_gap", "mu", "mu_gap", "kinetic", "linf_err_interior",
        "tail_probe", "laplacian_sup", "iterations", "residual",
    ] {
        assert!(rows[0].get(key).is_some(), "missing key {key}");
    }
}

#[test]
fn report_needs_three_rows() {
    let dir = tmp_dir("tworow");
    let path = dir.join("sweep.csv");
    let out = cq()
        .args([
            "sweep-thermo", "--dim", "1", "--rho", "0.5", "--L", "4,8", "--n", "512", "--out",
            path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    // The sweep itself already refuses two-point lists...
    assert_eq!(out.status.code(), Some(2));
    // ...and report refuses a hand-truncated two-row file.
    let full = dir.join("full.csv");
    let out = cq().args(small_sweep_args(&full)).output().unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&full).unwrap();
    let truncated: Vec<&str> = text.lines().take(3).collect();
    let short = dir.join("short.csv");
    std::fs::write(&short, format!("{}\n", truncated.join("\n"))).unwrap();
    let out = run(&["report", short.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn report_rejects_negated_gap_column() {
    let dir = tmp_dir("negated");
    let path = dir.join("sweep.csv");
    let out = cq().args(small_sweep_args(&path)).output().unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(|s| s.to_string()).collect();
    for line in lines.iter_mut().skip(1) {
        let mut f: Vec<String> = line.split(',').map(|s| s.to_string()).collect();
        let gap: f64 = f[3].parse().unwrap();
        f[3] = format!("{}", -gap);
        *line = f.join(",");
    }
    let bad = dir.join("bad.csv");
    std::fs::write(&bad, format!("{}\n", lines.join("\n"))).unwrap();
    let out = run(&["report", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4), "negated gap column violates the exact lower bound");
}

#[test]
fn report_rejects_malformed_file() {
    let dir = tmp_dir("malformed");
    let path = dir.join("junk.csv");
    std::fs::write(&path, "this,is,not\na,sweep,file\n").unwrap();
    let out = run(&["report", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_profile_out_is_two_column_text() {
    let dir = tmp_dir("profile");
    let path = dir.join("profile.dat");
    let out = run(&[
        "solve", "--dim", "1", "--rho", "0.5", "--L", "8", "--n", "512", "--profile-out",
        path.to_str().unwrap(), "--out", dir.join("s.json").to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let first = text.lines().next().unwrap();
    assert_eq!(first.split_whitespace().count(), 2);
    assert_eq!(text.lines().count(), 513);
}
