use std::path::Path;
use std::process::{Command, Output};

fn coinwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coinwalk")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

const NOISY: &str = r#"{
  "experiment": "distribution",
  "walk": { "theta": "pi/20", "steps": 12 },
  "noise": { "amplitude": 0.5, "realizations": 6, "seed": 3 }
}"#;

#[test]
fn run_writes_files_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), NOISY);
    let out = dir.path().join("out");
    let o = coinwalk(&["run", &cfg, "--out-dir", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["distribution.csv", "distribution.svg", "summary.json", "manifest.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let csv = std::fs::read_to_string(out.join("distribution.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("n,p"));

    let manifest = out.join("manifest.json");
    let o = coinwalk(&["check", manifest.to_str().unwrap(), "--rerun"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    std::fs::write(out.join("distribution.csv"), "n,p\n").unwrap();
    assert!(!coinwalk(&["check", manifest.to_str().unwrap()]).status.success());
}

#[test]
fn output_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), NOISY);
    let read = |threads: &str| {
        let out = dir.path().join(format!("t{threads}"));
        let o = coinwalk(&["run", &cfg, "--threads", threads, "--out-dir", out.to_str().unwrap()]);
        assert!(o.status.success());
        ["distribution.csv", "summary.json"].map(|f| std::fs::read(out.join(f)).unwrap())
    };
    assert_eq!(read("1"), read("3"));
}

#[test]
fn seed_override_changes_noisy_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), NOISY);
    let read = |seed: &str| {
        let out = dir.path().join(format!("s{seed}"));
        assert!(coinwalk(&["run", &cfg, "--seed", seed, "--out-dir", out.to_str().unwrap()]).status.success());
        std::fs::read(out.join("distribution.csv")).unwrap()
    };
    assert_ne!(read("1"), read("2"));
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{ "experiment": "distribution", "walk": { "theta": 0.1, "stpes": 4 } }"#);
    let o = coinwalk(&["run", &cfg]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("stpes"));
}

#[test]
fn validation_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{ "experiment": "distribution", "walk": { "theta": 2.0, "steps": 4 } }"#);
    let o = coinwalk(&["run", &cfg]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("walk.theta"));
}

#[test]
fn figure_aliases() {
    let list = coinwalk(&["figure", "--list"]);
    assert!(String::from_utf8_lossy(&list.stdout).lines().any(|l| l == "fig4b"));
    let o = coinwalk(&["figure", "fig1d", "--print-config"]);
    assert!(o.status.success());
    let cfg: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(cfg["walk"]["steps"], 100);
    assert!(!coinwalk(&["figure", "fig9"]).status.success());
}

#[test]
fn figure_runs_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig1a");
    let o = coinwalk(&["figure", "fig1a", "--out-dir", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("manifest.json").exists());
}
