use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn orvidx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orvidx")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("orvidx-cli-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d.join(name)
}

fn status_of(rep: &Value, id: &str) -> String {
    rep["conditions"].as_array().unwrap().iter().find(|c| c["id"] == id).unwrap()["status"]
        .as_str()
        .unwrap()
        .to_string()
}

#[test]
fn analyze_gevrey_sequence() {
    let out = orvidx(&["analyze-seq", "gevrey:alpha=2"]);
    assert_eq!(out.status.code(), Some(0));
    let rep = json_of(&out);
    assert_eq!(rep["schema"], 1);
    assert!((rep["gamma"].as_f64().unwrap() - 2.0).abs() <= 0.05);
    assert_eq!(rep["srs"], "holds");
}

#[test]
fn analyze_counterexample() {
    let rep = json_of(&orvidx(&["analyze-seq", "counterexample"]));
    assert!(rep["gamma"].as_f64().unwrap().abs() <= 0.05);
    assert_eq!(rep["gamma_omega"], "inf");
    assert_eq!(rep["srs"], "fails");
}

#[test]
fn gap_in_csv_is_an_input_error() {
    let p = scratch("bad.csv");
    std::fs::write(&p, "p,log_m\n0,0\n1,0.5\n3,1\n").unwrap();
    let out = orvidx(&["analyze-seq", "--input", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("gap after p=1"), "{err}");
}

#[test]
fn csv_sequence_round_trip() {
    let p = scratch("gevrey.csv");
    let mut s = String::from("p,log_m\n");
    for k in 0..2000 {
        s.push_str(&format!("{k},{}\n", ((k + 1) as f64).ln()));
    }
    std::fs::write(&p, s).unwrap();
    let m = orvidx::cli::read_sequence_csv(&p).unwrap();
    assert_eq!(m.horizon(), 2000);
    let out = orvidx(&["analyze-seq", "--input", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(status_of(&json_of(&out), "lc"), "holds");
}

#[test]
fn csv_function_input() {
    let p = scratch("sqrt.csv");
    let mut s = String::from("t,sigma\n");
    for k in 0..400 {
        let t = (k as f64 * 0.1).exp() - 1.0;
        s.push_str(&format!("{t},{}\n", t.sqrt()));
    }
    std::fs::write(&p, s).unwrap();
    let out = orvidx(&["analyze-fn", "--input", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rep = json_of(&out);
    assert!((rep["indices"]["alpha"].as_f64().unwrap() - 0.5).abs() <= 0.05);
}

#[test]
fn function_examples() {
    let rep = json_of(&orvidx(&["analyze-fn", "gevrey_fn:s=0.5"]));
    assert!((rep["indices"]["alpha"].as_f64().unwrap() - 0.5).abs() <= 0.05);
    assert!((rep["gamma"].as_f64().unwrap() - 2.0).abs() <= 0.1);
    assert_eq!(status_of(&rep, "om_snq"), "holds");

    let rep = json_of(&orvidx(&["analyze-fn", "logpow:s=2"]));
    assert_eq!(status_of(&rep, "om6"), "fails");
    assert_eq!(rep["gamma"], "inf");

    let rep = json_of(&orvidx(&["analyze-fn", "linlog:alpha=1"]));
    assert!((rep["gamma"].as_f64().unwrap() - 1.0).abs() <= 0.05);
    assert_eq!(status_of(&rep, "om_snq"), "fails");
}

#[test]
fn outputs_are_written_to_files() {
    let (out, plot) = (scratch("g.json"), scratch("g.csv"));
    let r = orvidx(&[
        "analyze-seq",
        "--family",
        "gevrey:alpha=1",
        "--out",
        out.to_str().unwrap(),
        "--plot",
        plot.to_str().unwrap(),
    ]);
    assert_eq!(r.status.code(), Some(0));
    assert!(r.stdout.is_empty());
    let rep: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(rep["command"], "analyze-seq");
    let csv = std::fs::read_to_string(&plot).unwrap();
    assert!(csv.starts_with("series,x,y\n"));
    assert!(csv.contains("\nomega,") && csv.contains("\nnu,"));
}

#[test]
fn invalid_settings_exit_with_2() {
    assert_eq!(orvidx(&["analyze-seq", "gevrey:alpha=2", "--tol", "0.7"]).status.code(), Some(2));
    assert_eq!(orvidx(&["analyze-seq", "gevrey:alpha=2", "--pmax", "8"]).status.code(), Some(2));
    assert_eq!(orvidx(&["analyze-fn", "gevrey_fn:s=0.5", "--xmax", "10"]).status.code(), Some(2));
    assert_eq!(orvidx(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(orvidx(&["analyze-seq", "nosuch:x=1"]).status.code(), Some(2));
    assert_eq!(orvidx(&["analyze-fn", "gevrey:alpha=1"]).status.code(), Some(2));
    assert_eq!(orvidx(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn verify_legendre_suite() {
    let out = orvidx(&["verify", "--suite", "legendre"]);
    assert_eq!(out.status.code(), Some(0));
    let rep = json_of(&out);
    assert_eq!(rep["summary"]["contradictions"], 0);
    assert!(rep["entries"].as_array().unwrap().len() >= 10);
}
