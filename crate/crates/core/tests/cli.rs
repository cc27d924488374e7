use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn dyadim(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dyadim"))
        .args(args)
        .current_dir(cwd)
        .env("DYADIM_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).unwrap();
}

#[test]
fn dimension_summary_line() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "d.cfg", "[weights]\nkind = constant\npairs = 0.5,0.5\n");
    let out = dyadim(&["dimension", "--config", "d.cfg", "--output-dir", "o"], dir.path());
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("lower=1.000000, upper=1.000000, mode=exact-periodic"), "{stdout}");
    assert!(dir.path().join("o/dimension.csv").exists());
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("o/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["horizon"], 10_000);
    assert_eq!(manifest["config"]["seed"], 0);
    assert_eq!(manifest["config"]["command"], "dimension");
}

#[test]
fn entropy_oracle_columns_agree() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "e.cfg",
        "horizon = 12\n[weights]\nkind = random\nseed = 42\nperiod = 16\n",
    );
    let out = dyadim(&["entropy", "--config", "e.cfg", "--output-dir", "o", "--oracle"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("o/entropy.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,H_nats,c_n,pi0,H_bruteforce_nats"));
    let mut rows = 0;
    for line in lines {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert!((cols[1] - cols[4]).abs() < 1e-10);
        rows += 1;
    }
    assert_eq!(rows, 12);
    assert!(!csv.contains('\r'));
}

#[test]
fn oracle_beyond_enumeration_limit_fails() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "e.cfg", "horizon = 30\n[weights]\nkind = constant\npairs = 0.3,0.7\n");
    let out = dyadim(&["entropy", "--config", "e.cfg", "--output-dir", "o", "--oracle"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("limit"));
}

#[test]
fn unknown_key_is_rejected_by_name() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.cfg", "horzon = 100\n[weights]\nkind = constant\npairs = 0.5,0.5\n");
    let out = dyadim(&["entropy", "--config", "bad.cfg"], dir.path());
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("horzon"), "{stderr}");
    assert!(!dir.path().join("out").exists());
}

#[test]
fn inseparable_counterexample_fails() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.json", r#"{"epsilon": 0.0, "stages": 1}"#);
    let out = dyadim(&["counterexample", "--config", "c.json"], dir.path());
    assert!(!out.status.success());
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "s.cfg",
        "depth = 2000\npaths = 50\ncheckpoints = 10, 100, 1000\n[weights]\nkind = periodic\npairs = 0.2,0.8; 0.6,0.4\n",
    );
    for run in ["a", "b"] {
        let out = dyadim(
            &["sample", "--config", "s.cfg", "--output-dir", run, "--seed", "9"],
            dir.path(),
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for file in ["path.csv", "smb.csv"] {
        let a = fs::read(dir.path().join("a").join(file)).unwrap();
        let b = fs::read(dir.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file}");
    }
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("a/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["seed"], 9);
}

#[test]
fn every_command_runs() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "all.cfg",
        "horizon = 2000\nwindow = 100\nn_max = 20\nk_max = 30\ngrid_step = 0.05\nstages = 2\n\
         [weights]\nkind = constant\npairs = 0.3,0.7\n",
    );
    let expected = [
        ("entropy", "entropy.csv"),
        ("dimension", "dimension.csv"),
        ("window-gap", "window_gap.csv"),
        ("lemma-scan", "lemma_scan.csv"),
        ("continuity", "sweep.csv"),
        ("counterexample", "ratio_report.csv"),
    ];
    for (command, file) in expected {
        let out = dyadim(&[command, "--config", "all.cfg", "--output-dir", command], dir.path());
        assert!(out.status.success(), "{command}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(dir.path().join(command).join(file).exists(), "{command}");
        assert!(dir.path().join(command).join("manifest.json").exists());
    }
    let plan: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("counterexample/stage_plan.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(plan["depths"].as_array().unwrap().len(), 2);
}
