use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use kottler_audit::io::{read_audit_json, read_trace_csv};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kottler-audit"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("scenario.conf");
    std::fs::write(&path, text).unwrap();
    path
}

const SMALL_SPHERE: &str = "[scenario small]\n[background]\nk = 1\nm = 1\n[surface]\nresolution = 17\nradius = 2\n\
                            amplitude = 0.2\n[flow]\nt_end = 0.5\n[audit]\nchecks = flow_completed, area_growth, hk_inequality\n";

#[test]
fn flow_writes_trace_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL_SPHERE);
    let out = dir.path().join("out");
    let output = run(&["flow", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0), "{}", String::from_utf8_lossy(&output.stderr));
    let rows = read_trace_csv(&out.join("small.csv")).unwrap();
    assert_eq!(rows.len(), 6);
    let audit = read_audit_json(&out.join("small.json")).unwrap();
    assert!(audit.passed);
    assert_eq!(audit.checks.len(), 3);
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("scenario small: PASS"));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("kappa = 2"));
}

#[test]
fn quiet_suppresses_output() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL_SPHERE);
    let output = run(&["flow", "--quiet", "--config", config.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0));
    assert!(output.stdout.is_empty() && output.stderr.is_empty());
}

#[test]
fn tight_tolerances_give_exit_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL_SPHERE);
    let output = run(&[
        "flow",
        "--quiet",
        "--tolerance-scale",
        "1e-12",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(1));
    let audit = read_audit_json(&dir.path().join("small.json")).unwrap();
    assert!(!audit.passed);
}

#[test]
fn flow_abort_gives_exit_code_three_and_partial_trace() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL_SPHERE.replace("t_end = 0.5\n", "t_end = 0.5\nh_floor = 1.95\n");
    let config = write_config(dir.path(), &text);
    let output = run(&["flow", "--quiet", "--config", config.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(3));
    assert_eq!(read_trace_csv(&dir.path().join("small.csv")).unwrap().len(), 1);
    let audit = read_audit_json(&dir.path().join("small.json")).unwrap();
    assert!(audit.abort.is_some() && !audit.passed);
}

#[test]
fn usage_and_config_errors_give_exit_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "[background]\nk = 1\nm = 1\nbogus = 3\n[surface]\nradius = 2\n");
    let output = run(&["flow", "--config", bad.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8(output.stderr).unwrap().contains("line 4"));

    assert_eq!(run(&["flow"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let good = scenario("critical-ads.conf");
    let good = good.to_str().unwrap();
    assert_eq!(run(&["audit", "--config", good, "--tolerance-scale", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["audit", "--config", good, "--scenario", "missing"]).status.code(), Some(2));
    assert_eq!(run(&["audit", "--config", "/nonexistent/file.conf"]).status.code(), Some(2));
}

#[test]
fn scenario_flag_selects_one_of_several() {
    let dir = tempfile::tempdir().unwrap();
    let config = scenario("spherical-area-window.conf");
    let output = run(&[
        "audit",
        "--quiet",
        "--config",
        config.to_str().unwrap(),
        "--scenario",
        "spherical-area-window-lower",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
    let written: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(written, ["spherical-area-window-lower.json"]);
}

#[test]
fn audit_skips_the_flow() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL_SPHERE);
    let output = run(&["audit", "--quiet", "--config", config.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0));
    assert!(!dir.path().join("small.csv").exists());
    let audit = read_audit_json(&dir.path().join("small.json")).unwrap();
    assert_eq!(audit.checks.iter().map(|c| c.name.as_str()).collect::<Vec<_>>(), ["hk_inequality"]);
}

#[test]
fn background_prints_the_bounds_table() {
    let config = scenario("critical-ads.conf");
    let output = run(&["background", "--quiet", "--config", config.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8(output.stdout).unwrap();
    for key in ["rho_m", "kappa", "mass upper bound", "radius window", "area window", " c "] {
        assert!(stdout.contains(key), "missing {key} in\n{stdout}");
    }
    assert!(stdout.contains("5.7735026918962"));
}

#[test]
fn chmass_prints_a_converging_table() {
    let config = scenario("kottler-slice-rigidity.conf");
    let output = run(&["chmass", "--quiet", "--config", config.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8(output.stdout).unwrap();
    let errors: Vec<f64> = stdout
        .lines()
        .skip(2)
        .map(|l| l.split_whitespace().last().unwrap().parse().unwrap())
        .collect();
    assert_eq!(errors.len(), 5);
    assert!(errors[..4].windows(2).all(|w| w[1].abs() < w[0].abs()));
    assert!(errors[4].abs() < 1e-3);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL_SPHERE);
    let mut outputs = Vec::new();
    for sub in ["a", "b"] {
        let out = dir.path().join(sub);
        let status = run(&["flow", "--quiet", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(status.status.code(), Some(0));
        outputs.push((std::fs::read(out.join("small.csv")).unwrap(), std::fs::read(out.join("small.json")).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
}
