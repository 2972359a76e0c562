use std::process::{Command, Output};

use serde_json::Value;

fn polylog(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polylog")).args(args).output().expect("binary runs")
}

fn lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("json line"))
        .collect()
}

#[test]
fn eval_li2_half() {
    let out = polylog(&["eval", "--j", "2", "--t", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = &lines(&out)[0];
    let ln2 = std::f64::consts::LN_2;
    let want = std::f64::consts::PI.powi(2) / 12.0 - ln2 * ln2 / 2.0;
    assert!((v["re"].as_f64().unwrap() - want).abs() < 1e-12);
    assert_eq!(v["method"], "series");
}

#[test]
fn eval_outside_disc_continues() {
    let out = polylog(&["eval", "--j", "2", "--t=-2,0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = &lines(&out)[0];
    assert_eq!(v["method"], "continuation");
    // Li2(-2) = -1.43674636688368...
    assert!((v["re"].as_f64().unwrap() + 1.4367463668836809).abs() < 1e-12);
}

#[test]
fn eval_at_root_uses_hurwitz() {
    let out = polylog(&["eval", "--j", "3", "--root", "1/4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = &lines(&out)[0];
    assert_eq!(v["method"], "hurwitz");
    let beta3 = std::f64::consts::PI.powi(3) / 32.0;
    assert!((v["im"].as_f64().unwrap() - beta3).abs() < 1e-12);
}

#[test]
fn domain_errors_exit_2() {
    assert_eq!(polylog(&["eval", "--j", "1", "--root", "1/2"]).status.code(), Some(2));
    assert_eq!(polylog(&["regulator", "--j", "2", "--d", "1"]).status.code(), Some(2));
    assert_eq!(polylog(&["--precision", "40", "eval", "--j", "2", "--t", "0.5"]).status.code(), Some(2));
    assert_eq!(polylog(&["verify", "nonsense"]).status.code(), Some(2));
}

#[test]
fn verify_is_deterministic() {
    let a = polylog(&["verify", "splitting"]);
    let b = polylog(&["verify", "splitting"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let records = lines(&a);
    assert_eq!(records[0]["kind"], "header");
    assert!(records[1..].iter().all(|r| r["passed"] == true));
}

#[test]
fn verify_single_loop() {
    let out = polylog(&["verify", "monodromy", "--n", "4", "--loop", "alpha1*alpha0^-1"]);
    assert_eq!(out.status.code(), Some(0));
    let records = lines(&out);
    assert!(records.len() >= 2);
    assert!(records[1..].iter().all(|r| r["passed"] == true));
}

#[test]
fn regulator_csv_to_file() {
    let dir = std::env::temp_dir().join(format!("polylog-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("reg.csv");
    let out = polylog(&["regulator", "--j", "2", "--d", "5", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    assert!(headers.iter().any(|h| h == "a"));
    assert!(rdr.records().count() > 0);
    std::fs::remove_dir_all(&dir).unwrap();
}
