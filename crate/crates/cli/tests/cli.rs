use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const CA_LEVELS: &str = include_str!("../../core/data/ca_ii_levels.csv");
const CA_LINES: &str = include_str!("../../core/data/ca_ii_lines.csv");

fn run(args: &[&str], env: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_shuttle-stark"));
    cmd.args(args).env_remove("STARK_DATA_DIR");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args, &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn value(v: &Value, path: &str) -> f64 {
    let mut cur = v;
    for key in path.split('.') {
        cur = &cur[key];
    }
    cur["value"].as_f64().unwrap_or_else(|| panic!("{path} missing in {v}"))
}

#[test]
fn quintic_zeta_normalized() {
    let r = json(&["zeta", "--traj", "quintic", "--L", "1", "--T", "1"]);
    assert!((value(&r, "results.zeta.normalized") - 120.0 / 7.0).abs() < 1e-9);
    assert_eq!(r["results"]["zeta"]["normalized"]["unit"], "1");
}

#[test]
fn phase_at_threshold_uses_whole_budget() {
    for qubit in ["ca40-sd", "be9-hyperfine"] {
        let t = json(&["threshold", "--qubit", qubit, "--L", "1e-4"]);
        let t_min = value(&t, "results.threshold.time");
        let p = json(&["phase", "--qubit", qubit, "--L", "1e-4", "--T", &t_min.to_string()]);
        let phi = value(&p, "results.stark.phi");
        assert!((phi.abs() / (std::f64::consts::PI / 100.0) - 1.0).abs() < 1e-9, "{qubit}: {phi}");
        // φ = (m²/ħ) Δχ ζ
        let m = value(&p, "inputs.mass");
        let expect = m * m / 1.054_571_817e-34 * value(&p, "results.stark.delta_chi") * value(&p, "results.zeta.zeta");
        assert!((phi / expect - 1.0).abs() < 1e-12);
    }
}

#[test]
fn rowe_sweep_oscillates_about_expected_mean() {
    let out = run(&["sweep", "--traj", "rowe", "--var", "T", "--from", "2.62e-5", "--to", "1.65e-4", "--points", "20", "--format", "csv"], &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header[0], "T[s]");
    let col = header.iter().position(|h| *h == "zeta_normalized[1]").unwrap();
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 20);
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0]), "rows out of sweep order");
    let mean = rows.iter().map(|r| r[col]).sum::<f64>() / rows.len() as f64;
    assert!((mean / 24.3 - 1.0).abs() < 0.1, "{mean}");
}

#[test]
fn reports_are_deterministic_and_written_to_out() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for path in [&a, &b] {
        let out = run(&["decoherence", "--out", path.to_str().unwrap()], &[]);
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn every_number_carries_a_unit() {
    fn check(v: &Value, parent_has_unit: bool, path: &str) {
        match v {
            Value::Number(_) => assert!(parent_has_unit, "bare number at {path}"),
            Value::Array(items) => items.iter().for_each(|x| check(x, parent_has_unit, path)),
            Value::Object(map) => {
                let tagged = map.contains_key("unit");
                for (k, child) in map {
                    let leaf = tagged && (k == "value" || k == "values");
                    check(child, leaf, &format!("{path}.{k}"));
                }
            }
            _ => {}
        }
    }
    for args in [
        vec!["decoherence", "--qubit", "be9-hyperfine"],
        vec!["decoherence"],
        vec!["optimize", "--omegas", "1e7,2e7", "--points", "11"],
        vec!["simulate", "--L", "2e-8", "--T", "5.5e-7"],
        vec!["sweep", "--var", "L", "--from", "1e-5", "--to", "1e-4", "--points", "3"],
    ] {
        check(&json(&args), false, "");
    }
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "qubit = \"be9-hyperfine\"\n[trajectory]\nkind = \"quintic\"\nlength = 2e-4\nduration = 1e-6\n").unwrap();
    let r = json(&["zeta", "--config", cfg.to_str().unwrap(), "--L", "5e-5"]);
    assert_eq!(r["inputs"]["qubit"], "be9-hyperfine");
    assert_eq!(r["inputs"]["trajectory"], "quintic");
    assert_eq!(value(&r, "inputs.length"), 5e-5);
    assert_eq!(value(&r, "inputs.duration"), 1e-6);
}

#[test]
fn data_dir_override_changes_checksums_and_results() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("ca_ii_levels.csv"), CA_LEVELS).unwrap();
    fs::write(dir.path().join("ca_ii_lines.csv"), CA_LINES.replace("12.1923", "24.3846")).unwrap();
    let bundled = json(&["threshold"]);
    let out = run(&["threshold"], &[("STARK_DATA_DIR", dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let custom: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(bundled["data_files"][0]["sha256"], custom["data_files"][0]["sha256"]);
    assert_ne!(bundled["data_files"][1]["sha256"], custom["data_files"][1]["sha256"]);
    assert_ne!(value(&bundled, "results.threshold.delta_chi"), value(&custom, "results.threshold.delta_chi"));

    let missing = run(&["threshold"], &[("STARK_DATA_DIR", &dir.path().join("nope"))]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn exit_codes_distinguish_validation_from_numerics() {
    let bad = run(&["phase", "--T=-1"], &[]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("error[validation]"));

    let usage = run(&["phase", "--traj", "zigzag"], &[]);
    assert_eq!(usage.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("strict.toml");
    fs::write(&cfg, "[tolerances]\nleakage_limit = 1e-300\n").unwrap();
    let strict = run(&["simulate", "--config", cfg.to_str().unwrap(), "--L", "2e-8", "--T", "5.5e-7"], &[]);
    assert_eq!(strict.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&strict.stderr).contains("error[numerical]"));
}

#[test]
fn optimize_emits_one_well_column_per_frequency() {
    let out = run(&["optimize", "--omegas", "1e7,2e7,4e7", "--points", "11", "--format", "csv"], &[]);
    let text = String::from_utf8(out.stdout).unwrap();
    let header = text.lines().next().unwrap();
    assert_eq!(header.split(',').count(), 5);
    assert_eq!(text.lines().count(), 12);
}
