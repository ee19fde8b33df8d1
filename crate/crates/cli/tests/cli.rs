use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qrf_lab::{load_spec, run, RunConfig, Source, CSV_COLUMNS, EXIT_CHECK_FAILED, EXIT_ERROR, EXIT_PASS};

fn qrf_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrf-lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

const SMALL: &str = r#"
trials = 3
seed = 9
checks = ["diagonal_invariant", "frame_change"]

[group]
kind = "cyclic"
n = 2

[system]
regular = true

[[frames]]
ideal = true

[[frames]]
ideal = true
"#;

#[test]
fn presets_lists_all_bundled_names() {
    let out = qrf_lab(&["presets"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "z2-ideal-pair",
        "z3-three-frames",
        "s3-two-frames",
        "z2-nonideal-deff1",
        "z3-tradeoff-violation",
        "zn-clock-cutoff",
    ] {
        assert!(text.contains(name), "{name} missing from\n{text}");
    }
}

#[test]
fn passing_config_exits_zero_and_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    fs::write(&cfg, SMALL).unwrap();
    let out_dir = dir.path().join("out");
    let out = qrf_lab(&["run", cfg.to_str().unwrap(), "--out", &out_arg(&out_dir), "--format", "json,csv"]);
    assert_eq!(out.status.code(), Some(EXIT_PASS), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS ")).count(), 2);
    assert!(out_dir.join("report.json").exists());
    let table = fs::read_to_string(out_dir.join("diagonal_invariant.csv")).unwrap();
    assert_eq!(table.lines().next().unwrap(), CSV_COLUMNS.join(","));
    assert!(table.lines().count() > 1);
}

#[test]
fn impossible_tolerance_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = qrf_lab(&["run", "--preset", "z3-three-frames", "--trials", "2", "--tol", "1e-30", "--out", &out_arg(dir.path())]);
    assert_eq!(out.status.code(), Some(EXIT_CHECK_FAILED));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("FAIL diagonal_invariant"), "{stdout}");
    let report = fs::read_to_string(dir.path().join("report.json")).unwrap();
    assert!(report.contains("\"max_residual\""));
}

#[test]
fn missing_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = qrf_lab(&["run", "/nonexistent/exp.toml", "--out", &out_arg(dir.path())]);
    assert_eq!(out.status.code(), Some(EXIT_ERROR));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read config"));
}

#[test]
fn unknown_key_and_unknown_preset_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, format!("flavour = 1\n{SMALL}")).unwrap();
    let out = qrf_lab(&["run", cfg.to_str().unwrap(), "--out", &out_arg(dir.path())]);
    assert_eq!(out.status.code(), Some(EXIT_ERROR));
    assert!(String::from_utf8_lossy(&out.stderr).contains("flavour"));
    let out = qrf_lab(&["run", "--preset", "z9-nothing", "--out", &out_arg(dir.path())]);
    assert_eq!(out.status.code(), Some(EXIT_ERROR));
}

#[test]
fn identical_runs_give_identical_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let out = qrf_lab(&["run", "--preset", "z2-ideal-pair", "--trials", "5", "--out", &out_arg(d.path()), "--format", "json,csv"]);
        assert_eq!(out.status.code(), Some(EXIT_PASS));
    }
    for f in ["report.json", "diagonal_invariant.csv", "nonideal_bound.csv"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let c = tempfile::tempdir().unwrap();
    qrf_lab(&["run", "--preset", "z2-ideal-pair", "--trials", "5", "--seed", "99", "--out", &out_arg(c.path())]);
    assert_ne!(fs::read(a.path().join("report.json")).unwrap(), fs::read(c.path().join("report.json")).unwrap());
}

#[test]
fn overrides_are_applied_and_validated() {
    let mut cfg = RunConfig::new(Source::Preset("z2-ideal-pair".into()), "unused");
    cfg.trials = Some(7);
    cfg.seed = Some(123);
    cfg.alphas = Some(vec![2.0]);
    let spec = load_spec(&cfg).unwrap();
    assert_eq!((spec.trials, spec.seed, spec.alphas.clone()), (7, 123, vec![2.0]));
    cfg.trials = Some(0);
    assert!(load_spec(&cfg).is_err());
}

#[test]
fn library_run_reports_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::new(Source::Preset("z2-nonideal-deff1".into()), dir.path());
    cfg.trials = Some(3);
    cfg.quiet = true;
    let (mut out, mut err) = (Vec::new(), Vec::new());
    assert_eq!(run(&cfg, &mut out, &mut err), EXIT_PASS);
    assert!(out.is_empty());
    cfg.source = Source::File(dir.path().join("missing.toml"));
    assert_eq!(run(&cfg, &mut out, &mut err), EXIT_ERROR);
    assert!(!err.is_empty());
}
