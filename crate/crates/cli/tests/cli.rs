use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qcaclock(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_qcaclock")).args(args).output().expect("binary runs");
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> std::path::PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn device_show_prints_kinks_and_bias() {
    let text = stdout(&qcaclock(&["device", "show", "wire-3"]));
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "cell,h,c1,c2,c3");
    assert_eq!(rows.len(), 4);
    let first: Vec<f64> = rows[1].split(',').skip(1).map(|x| x.parse().unwrap()).collect();
    assert_eq!(first, vec![1.0, 0.0, 1.0, 0.0]);
}

#[test]
fn device_export_round_trips_through_sweep_config() {
    let dir = scratch("export");
    let file = dir.join("maj.json");
    std::fs::write(&file, stdout(&qcaclock(&["device", "export", "maj-101"]))).unwrap();
    let a = stdout(&qcaclock(&["device", "show", "maj-101"]));
    let b = stdout(&qcaclock(&["device", "show", file.to_str().unwrap()]));
    assert_eq!(a, b);
}

#[test]
fn analyze_reports_quality_and_thresholds() {
    let v: Value = serde_json::from_str(&stdout(&qcaclock(&["analyze", "--device", "maj-101", "--format", "json"]))).unwrap();
    for key in ["f0", "f1", "q0", "q1", "alpha1_bound", "delta1", "d1", "beta_star", "relaxed_crossing", "mean_field_crossing"] {
        assert!(!v[key].is_null(), "missing {key}");
    }
    assert!((v["q1"].as_f64().unwrap() - 0.9943).abs() < 1e-4);
}

#[test]
fn spectrum_columns_and_fit() {
    let dir = scratch("spectrum");
    let out = dir.join("inv.csv");
    qcaclock(&["spectrum", "--device", "inverter", "--levels", "4", "--grid", "201", "--out", out.to_str().unwrap()]);
    let csv = std::fs::read_to_string(&out).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(header, "s,e0,e1,e2,e3,gap,e1_minus_e0,e2_minus_e0,e3_minus_e0");
    assert_eq!(csv.lines().count(), 202);
    let summary: Value = serde_json::from_str(&std::fs::read_to_string(out.with_extension("json")).unwrap()).unwrap();
    let d0 = summary["fit"]["delta0"].as_f64().unwrap();
    assert!((d0 - 0.362).abs() < 0.02, "{d0}");
}

#[test]
fn sweep_writes_points_and_summary() {
    let dir = scratch("sweep");
    let out = dir.join("w3.csv");
    qcaclock(&[
        "sweep-freq", "--device", "wire-3", "--gamma-min", "1e-2", "--gamma-max", "0.2", "--gamma-points", "6", "--threads", "2",
        "--out", out.to_str().unwrap(),
    ]);
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("dissipation,gamma,delta,q_a,q_cl,q_l,error\n"));
    assert_eq!(csv.lines().count(), 7);
    let summary: Value = serde_json::from_str(&std::fs::read_to_string(out.with_extension("json")).unwrap()).unwrap();
    let gm = &summary["gamma_max"][0]["gamma_max"]["q_l"];
    assert_eq!(gm["status"], "found");
    assert!((gm["operating"].as_f64().unwrap() - 15.1e-3).abs() < 2e-3);
}

#[test]
fn evolve_outputs_for_both_engines() {
    let dense = stdout(&qcaclock(&["evolve", "--device", "wire-3", "--runrate", "0.05", "--sampling", "5", "--summary", "/dev/null"]));
    assert!(dense.starts_with("s,q_a,sigmax_c1,sigmay_c1,sigmaz_c1"));
    assert_eq!(dense.lines().count(), 6);

    let dir = scratch("evolve");
    let out = dir.join("w5.csv");
    qcaclock(&["evolve", "--device", "wire-5", "--engine", "icha", "--runrate", "0.02", "--out", out.to_str().unwrap()]);
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("s,lambdax_c1,lambday_c1,lambdaz_c1"));
    let summary: Value = serde_json::from_str(&std::fs::read_to_string(out.with_extension("json")).unwrap()).unwrap();
    let f = summary["probe"]["oscillation_frequency"].as_f64().unwrap();
    assert!((f - 8.0).abs() < 0.4, "{f}");
}

#[test]
fn bad_arguments_fail_cleanly() {
    let out = Command::new(env!("CARGO_BIN_EXE_qcaclock")).args(["evolve", "--device", "nosuch", "--runrate", "0.1"]).output().unwrap();
    assert!(!out.status.success());
    let out = Command::new(env!("CARGO_BIN_EXE_qcaclock"))
        .args(["sweep-freq", "--engine", "dense", "--dissipation", "meanfield:beta=5", "--rate", "0.1"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}
