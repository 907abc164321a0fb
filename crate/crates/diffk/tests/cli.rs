use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn diffk(args: &[&str]) -> Output {
    diffk_in(args, &[])
}

fn diffk_in(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_diffk"));
    cmd.args(args).env_remove("DIFFK_RESOLUTION");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn record(dir: &Path, command: &str, key: &str) -> serde_json::Value {
    let body = std::fs::read_to_string(dir.join(format!("{command}.jsonl"))).unwrap();
    body.lines().map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()).find(|v| v["key"] == key).unwrap()
}

#[test]
fn flat_disk_pairing_reports_its_holonomy() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = diffk(&["pairing", "--catalog", "disk2_flat", "--a", "0.25", "--output", out]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let value = record(dir.path(), "pairing", "pairing.disk2_flat.a=0.25.value")["value"].as_f64().unwrap();
    assert!((value - 0.25).abs() < 1e-6);
    let summary = std::fs::read_to_string(dir.path().join("pairing.summary.txt")).unwrap();
    assert_eq!(summary, "pairing: 2 checks, 0 failed\n");
}

#[test]
fn hopf_certificate_passes() {
    let o = diffk(&["adiabatic", "--catalog", "hopf", "--lmax", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("ok   adiabatic.certificate.trace.l=2"));
}

#[test]
fn tolerance_failures_exit_one_and_name_the_check() {
    let o = diffk(&["pairing", "--a", "0.25", "--tol", "angle=1e-15"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("pairing.disk2_flat.a=0.25.angle_error"), "{err}");
}

#[test]
fn configuration_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(&config, "command = \"eta\"\nalpha = 1\n").unwrap();
    for args in [
        vec!["--config", config.to_str().unwrap()],
        vec!["eta", "--tol", "eta=-1"],
        vec!["eta", "--tol", "order=1e-3"],
        vec!["pairing", "--catalog", "klein_bottle"],
        vec!["adiabatic", "--catalog", "torus2"],
        vec!["suite", "--only", "13"],
    ] {
        let o = diffk(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = diffk(&["--config", config.to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("alpha"));
}

#[test]
fn the_resolution_falls_back_to_the_environment() {
    let coarse = diffk_in(&["pairing", "--a", "0.1"], &[("DIFFK_RESOLUTION", "32")]);
    let fine = diffk(&["pairing", "--a", "0.1"]);
    assert_eq!(coarse.status.code(), Some(0));
    assert_ne!(stdout(&coarse), stdout(&fine));
    let flag = diffk_in(&["pairing", "--a", "0.1", "--resolution", "64"], &[("DIFFK_RESOLUTION", "32")]);
    assert_eq!(stdout(&flag), stdout(&fine));
    let bad = diffk_in(&["pairing"], &[("DIFFK_RESOLUTION", "many")]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let o = diffk(&["cs-check", "--catalog", "torus2", "--resolution", "24", "--seed", "5", "--output", d.path().to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    }
    for file in ["cs-check.jsonl", "cs-check.summary.txt"] {
        let read = |d: &tempfile::TempDir| std::fs::read(d.path().join(file)).unwrap();
        assert_eq!(read(&dirs[0]), read(&dirs[1]), "{file}");
    }
    let other = tempfile::tempdir().unwrap();
    diffk(&["cs-check", "--catalog", "torus2", "--resolution", "24", "--seed", "6", "--output", other.path().to_str().unwrap()]);
    assert_ne!(std::fs::read(other.path().join("cs-check.jsonl")).unwrap(), std::fs::read(dirs[0].path().join("cs-check.jsonl")).unwrap());
}

#[test]
fn run_config_files_and_flags_combine() {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/cs_named.toml");
    let o = diffk(&["--config", data.to_str().unwrap(), "--lmax", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("cs.twisted_torus.closure.l=2"));
}

#[test]
fn suite_subsets_report_their_criteria() {
    let dir = tempfile::tempdir().unwrap();
    let o = diffk(&["suite", "--only", "2,8", "--output", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let body = std::fs::read_to_string(dir.path().join("suite.jsonl")).unwrap();
    assert!(body.lines().all(|l| l.contains("\"c02.") || l.contains("\"c08.")));
    assert_eq!(body.lines().count(), 3);
}
