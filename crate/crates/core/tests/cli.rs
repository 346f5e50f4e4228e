use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn homlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_homlab")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(bytes)))
}

/// Everything before the metadata block.
fn science_part(text: &str) -> &str {
    &text[..text.find("\"metadata\"").expect("metadata block")]
}

const CONSTANT: &str = r#"{"ensemble": {"kind": "bernoulli", "lambda": 0.25, "alpha": 0.5, "beta": 0.5, "p_low": 0.5}}"#;

#[test]
fn corrector_on_constant_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", CONSTANT);
    let out = homlab(&["corrector", "--config", &cfg, "--L", "8"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out.stdout);
    let s = &v["science"];
    assert!(s["residual"].as_f64().unwrap() <= 1e-10);
    assert!(s["grad_phi_norm"].as_f64().unwrap() <= 1e-9);
    assert_eq!(s["energy_density"].as_f64().unwrap(), 0.5);
    assert_eq!(v["config"]["L"][0], 8);
    assert!(v["metadata"]["timestamp"].is_string());
}

#[test]
fn every_validation_issue_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bad.json",
        r#"{"ensemble": {"kind": "bernoulli", "lambda": 0.25, "alpha": 0.1, "beta": 1.0, "p_low": 0.5}, "bogus": 1}"#,
    );
    let out = homlab(&["homogenize", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = json(&out.stderr);
    assert_eq!(err["error"]["stage"], "config");
    let paths: Vec<&str> = err["error"]["issues"].as_array().unwrap().iter().map(|i| i["path"].as_str().unwrap()).collect();
    assert!(paths.contains(&"bogus") && paths.contains(&"ensemble.alpha"), "{paths:?}");

    let out = homlab(&["corrector", "--lambda", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8_lossy(&out.stderr);
    assert!(text.contains("ensemble.lambda") && text.contains("(0,1)"), "{text}");
}

#[test]
fn syntax_errors_carry_a_position() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.json", "{\n  \"d\": 2,,\n}");
    let out = homlab(&["corrector", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = json(&out.stderr);
    let issue = &err["error"]["issues"][0];
    assert_eq!(issue["line"], 2);
    assert!(issue["column"].as_u64().unwrap() > 0);
}

#[test]
fn unknown_command_and_missing_config_fail() {
    assert_eq!(homlab(&["frobnicate"]).status.code(), Some(2));
    let out = homlab(&["corrector", "--config", "/nonexistent/cfg.json"]);
    assert!(!out.status.success());
    assert_eq!(json(&out.stderr)["error"]["kind"], "io");
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"d": 3, "L": 4, "seed": 5}"#);
    let out = homlab(&["homogenize", "--config", &cfg, "--d", "2", "--L", "6"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out.stdout);
    assert_eq!(v["config"]["d"], 2);
    assert_eq!(v["config"]["L"][0], 6);
    assert_eq!(v["config"]["seed"], 5);
}

#[test]
fn reruns_are_byte_identical_outside_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = homlab(&["moments", "--L", "6", "--samples", "8", "--seed", "17", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        (std::fs::read_to_string(&out).unwrap(), std::fs::read(out.with_extension("csv")).unwrap())
    };
    let (a, acsv) = run("a.json");
    let (b, bcsv) = run("b.json");
    assert_eq!(science_part(&a), science_part(&b));
    assert_eq!(acsv, bcsv);
    let other = homlab(&["moments", "--L", "6", "--samples", "8", "--seed", "18"]);
    assert_ne!(science_part(&a), science_part(&String::from_utf8_lossy(&other.stdout)));
}

#[test]
fn variance_scan_writes_csv_and_slope() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.json");
    let o = homlab(&["variance-scan", "--L", "8,16,32,64", "--samples", "12", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.with_extension("csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("L,"));
    for (line, l) in lines[1..].iter().zip(["8", "16", "32", "64"]) {
        assert_eq!(line.split(',').next(), Some(l));
    }
    let v = json(&std::fs::read(&out).unwrap());
    assert!(v["science"]["slope"].as_f64().unwrap().is_finite());
    // nothing but the two reports is left behind
    let mut names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(names, ["scan.csv", "scan.json"]);
}

#[test]
fn field_dump_round_trip_and_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let field = dir.path().join("a.hgl");
    let fpath = field.to_str().unwrap();
    let cfg = write(dir.path(), "dump.json", &format!(r#"{{"L": 6, "seed": 9, "dump": "{fpath}"}}"#));
    let first = homlab(&["homogenize", "--config", &cfg]);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let bytes = std::fs::read(&field).unwrap();
    assert_eq!(&bytes[..4], b"HGL1");
    assert_eq!(bytes.len(), 24 + 8 * 2 * 36);

    let load = write(dir.path(), "load.json", &format!(r#"{{"field": "{fpath}"}}"#));
    let second = homlab(&["homogenize", "--config", &load]);
    assert!(second.status.success(), "{}", String::from_utf8_lossy(&second.stderr));
    let (a, b) = (json(&first.stdout), json(&second.stdout));
    assert_eq!(a["science"], b["science"]);

    let mut bad = bytes.clone();
    bad[0] = b'X';
    std::fs::write(&field, &bad).unwrap();
    let out = homlab(&["homogenize", "--config", &load]);
    assert_eq!(out.status.code(), Some(1));
    let err = json(&out.stderr);
    assert_eq!(err["error"]["kind"], "bad_magic");
    assert!(err["error"]["message"].as_str().unwrap().contains("HGL1"));

    std::fs::write(&field, &bytes[..bytes.len() - 8]).unwrap();
    let out = homlab(&["homogenize", "--config", &load]);
    let msg = json(&out.stderr)["error"]["message"].as_str().unwrap().to_string();
    assert!(msg.contains(&bytes.len().to_string()) && msg.contains(&(bytes.len() - 8).to_string()), "{msg}");
}

#[test]
fn sg_check_runs_and_rejects_large_lattices() {
    let out = homlab(&["sg-check", "--L", "2", "--q", "1.25,1.5,2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out.stdout);
    assert_eq!(v["science"]["n_configurations"], 256);
    let out = homlab(&["sg-check", "--L", "4"]);
    assert_eq!(out.status.code(), Some(2));
}
