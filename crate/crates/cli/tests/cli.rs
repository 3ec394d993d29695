use std::path::Path;
use std::process::{Command, Output};

fn simqg(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_simqg"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env("SIMQG_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn run_reports_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = simqg(&["run"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let pop = v["population"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&pop));
    assert!(v["mass_kg"].as_f64().unwrap() > 1e-18);
}

#[test]
fn paths_table_has_eight_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = simqg(&["paths"], dir.path());
    assert!(o.status.success());
    let text = std::fs::read_to_string(dir.path().join("fig6_paths.csv")).unwrap();
    let labels: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(labels, ["0000", "0011", "0101", "0110", "1001", "1010", "1100", "1111"]);
    assert!(stdout(&o).starts_with("label,"));
    assert!(dir.path().join("fig6_paths.json").exists());
}

#[test]
fn bad_config_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"timing": {"T_s": 1e-3, "bogus": 1}}"#).unwrap();
    let o = simqg(&["--config", cfg.to_str().unwrap(), "run"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    std::fs::write(&cfg, r#"{"timing": {"T_s": -1.0}}"#).unwrap();
    let o = simqg(&["--config", cfg.to_str().unwrap(), "phase"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = simqg(&["fig", "--id", "nope"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn trace_and_spectrum_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = simqg(&["trace", "--mode", "closed-pairs", "--t-min", "1e-5", "--t-max", "1e-4", "--n", "64"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let trace = dir.path().join("trace.csv");
    assert_eq!(std::fs::read_to_string(&trace).unwrap().lines().count(), 65);
    let o = simqg(&["spectrum", "--input", trace.to_str().unwrap(), "--window", "hann"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("peaks"));
    assert!(dir.path().join("spectrum.csv").exists());
}

#[test]
fn figure_reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = simqg(&["--seed", "11", "fig", "--id", "5"], d.path());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let mut names: Vec<_> = std::fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(!names.is_empty());
    for n in names {
        let x = std::fs::read(a.path().join(&n)).unwrap();
        let y = std::fs::read(b.path().join(&n)).unwrap();
        assert_eq!(x, y, "{n:?}");
    }
}
