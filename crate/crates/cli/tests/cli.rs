use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symbidisk")).args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn corrupted_rule_exits_2() {
    let o = run(&["verify", "--quad", "1x256"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("invalid rule"), "{}", stderr(&o));
}

#[test]
fn missing_seed_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"schema_version": 1, "mc": 10000}"#).unwrap();
    let o = run(&["verify", "--suite", "operators", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("seed required"), "{}", stderr(&o));
}

#[test]
fn bad_schema_and_flags_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"schema_version": 9}"#).unwrap();
    assert_eq!(run(&["tent-area", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["tent-area", "--weight", "bogus:1"]).status.code(), Some(2));
    assert_eq!(run(&["tent-area", "--w2", "1.5:0"]).status.code(), Some(2));
}

#[test]
fn verify_suite_writes_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = run(&["verify", "--suite", "symbolic", "--quad", "32x64", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let entries = report.as_array().unwrap();
    assert_eq!(entries.len(), 4);
    for e in entries {
        for key in ["suite", "case", "status", "value", "tolerance"] {
            assert!(e.get(key).is_some(), "missing {key}");
        }
        assert_eq!(e["status"], "pass");
    }
}

#[test]
fn tent_area_csv_carries_provenance() {
    let o = run(&["tent-area", "--seed", "7", "--quad", "32x64"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.ends_with("config_hash,seed,n_r,n_theta"));
    let rows: Vec<&str> = lines.collect();
    assert!(rows.len() >= 5);
    assert!(rows.iter().all(|r| r.ends_with(",7,32,64")));
}

#[test]
fn sweep_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"schema_version": 1, "seed": 3, "p": [3.0], "weight": "pair_power:2:0:0", "w2": [[0.5, 0.0], [0.0, 0.5]],
            "r_min": 0.01, "refine_levels": [1, 2], "out": "sweep.csv"}"#,
    )
    .unwrap();
    let a = run(&["bb-sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    let first = fs::read(dir.path().join("sweep.csv")).unwrap();
    let b = run(&["bb-sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(b.status.code(), Some(0));
    assert_eq!(first, fs::read(dir.path().join("sweep.csv")).unwrap());
    let text = String::from_utf8(first).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().skip(1).all(|l| l.contains(",bounded,")));
}

#[test]
fn ibp_check_records_nonzero_beta() {
    let o = run(&["ibp-check", "--quad", "32x64"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().any(|l| l.contains(",recorded,")));
    assert!(text.lines().filter(|l| l.contains(",0,0,")).all(|l| l.contains(",pass,")));
}
