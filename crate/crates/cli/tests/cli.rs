use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cmdiv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

#[test]
fn power_exists_failure_has_witness() {
    let out = run(&["randset", "power-exists", "--dist", "uniform-singleton:3", "--alpha", "1.5"]);
    assert_eq!(code(&out), 1);
    let doc = json(&out);
    assert_eq!(doc["command"], "randset power-exists");
    assert_eq!(doc["verdict"], "negative");
    let w = &doc["result"]["witness"];
    assert_eq!(w["mask"], 7);
    assert_eq!(w["set"], "{1,2,3}");
    assert!((w["q"].as_f64().unwrap() + 0.0556429).abs() < 1e-6);
    assert_eq!(doc["config"]["seed"], 0);
}

#[test]
fn power_exists_success_includes_distribution() {
    let out = run(&["randset", "power-exists", "--dist", "uniform-singleton:3", "--alpha", "2.5"]);
    assert_eq!(code(&out), 0);
    assert!(json(&out)["result"]["distribution"]["support"].is_array());
}

#[test]
fn cm_check_on_reconstructed_function() {
    let dir = TempDir::new().unwrap();
    let lat = path(&dir, "diamond3.lat");
    let out = run(&["lattice", "make", "--name", "diamond3", "--write", &lat]);
    assert_eq!(code(&out), 0);
    // weights (0, 1/4, 1/4, 1/4, 1/4) summed over upper sets
    let f = path(&dir, "f.txt");
    fs::write(&f, "lattice diamond3.lat\n0 1\n1 1/2\n2 1/2\n3 1/2\n4 1/4\n").unwrap();
    let out = run(&["cm", "check", "--fn", &f, "--bruteforce"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out);
    assert_eq!(doc["result"]["weights"][0], "0");
    assert_eq!(doc["result"]["bruteforce"]["agrees"], true);

    let out = run(&["cm", "power", "--lattice", &lat, "--fn", &f, "--alpha", "0.5"]);
    assert_eq!(code(&out), 1);
    let cert = &json(&out)["result"]["certificate"];
    assert_eq!(cert["element"], 0);
    assert_eq!(cert["covers"], serde_json::json!([1, 2, 3]));
}

#[test]
fn cm_check_rejects_non_cm() {
    let dir = TempDir::new().unwrap();
    let f = path(&dir, "g.txt");
    fs::write(&f, "0 1\n1 0.7071\n2 0.7071\n3 0\n").unwrap();
    let out = run(&["cm", "check", "--lattice", "boolean2", "--fn", &f, "--float"]);
    assert_eq!(code(&out), 1);
    assert!(json(&out)["result"]["min_weight"].as_f64().unwrap() < -0.4);
}

#[test]
fn extension_and_accompaniment() {
    let dir = TempDir::new().unwrap();
    let f = path(&dir, "sq.txt");
    fs::write(&f, "0 1\n1 9/10\n2 9/10\n3 4/5\n").unwrap();
    let ext = path(&dir, "ext.txt");
    let out = run(&[
        "cm", "extend", "--lattice", "boolean3", "--elements", "0,1,2,3", "--fn", &f, "--write", &ext,
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["result"]["restriction_matches"], true);
    let out = run(&["cm", "accompany", "--fn", &ext, "--m", "5"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["result"]["is_cm"], true);
}

#[test]
fn psi_limit() {
    let out = run(&["approx", "psi", "--m", "1000"]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    let m_gap = doc["result"]["rows"][0]["m_gap"].as_f64().unwrap();
    assert!((m_gap - 0.27067).abs() <= 0.01 * 0.27067);
    assert!(doc["result"]["lower_bound"]["lower_constant"].as_f64().unwrap() > 0.04);
}

#[test]
fn psi_table_csv() {
    let dir = TempDir::new().unwrap();
    let csv = path(&dir, "psi.csv");
    let out = run(&["approx", "psi", "--m-list", "1,10,100", "--csv", &csv]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.starts_with("m,t_m,sup_gap"));
}

#[test]
fn scan_writes_grid() {
    let dir = TempDir::new().unwrap();
    let csv = path(&dir, "grid.csv");
    let out = run(&["scan", "s-set", "--dist", "singleton:0.1,0.2,0.3,0.4", "--csv", &csv]);
    assert_eq!(code(&out), 0);
    let comps = json(&out)["result"]["components"].as_array().unwrap().len();
    assert_eq!(comps, 4);
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 502);
}

#[test]
fn multi_interval_and_schur() {
    let out = run(&["scan", "multi-interval", "--n", "4", "--k", "2"]);
    assert_eq!(code(&out), 0);
    assert!(json(&out)["result"]["levels"].is_array());
    let out = run(&["scan", "schur", "--n", "2", "--alpha", "1.5", "--x", "0.4,0.2"]);
    assert_eq!(code(&out), 0);
    let out = run(&["scan", "schur", "--n", "2", "--alpha", "2.5", "--x", "0.4,0.2"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn hankel_search() {
    let out = run(&["cmseq", "hankel", "--x", "0.5", "--alpha", "1.5"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["result"]["failing_order"], 4);
    let out = run(&["cmseq", "hankel", "--y", "0.6931471805599453", "--alpha", "1.5"]);
    assert_eq!(json(&out)["result"]["failing_order"], 4);
    let out = run(&["cmseq", "hankel", "--x", "0.5", "--alpha", "2", "--cap", "10"]);
    assert_eq!(code(&out), 0);
    let out = run(&["cmseq", "hankel", "--x", "0.5", "--alpha", "1.5", "--order", "3"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn void_round_trip_and_invalid_void() {
    let dir = TempDir::new().unwrap();
    let v = path(&dir, "v.txt");
    let out = run(&["randset", "void", "--dist", "random:3", "--seed", "5", "--write", &v]);
    assert_eq!(code(&out), 0);
    let d = path(&dir, "x.txt");
    let back = run(&["randset", "invert", "--void", &v, "--write", &d]);
    assert_eq!(code(&back), 0);
    let again = run(&["randset", "dist", "--dist", "random:3", "--seed", "5"]);
    assert_eq!(json(&again)["result"]["text"], fs::read_to_string(&d).unwrap());

    let bad = path(&dir, "bad.txt");
    fs::write(&bad, "2\n0 1\n1 0.7071067811865476\n2 0.7071067811865476\n3 0\n").unwrap();
    let out = run(&["randset", "invert", "--void", &bad, "--float"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["result"]["witness"]["set"], "{1,2}");
}

#[test]
fn unions_and_poisson() {
    let out = run(&["randset", "union", "--dist", "singleton:1/2,1/2", "--m", "2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["result"]["text"], "2\n1 1/4\n2 1/4\n3 1/2\n");
    let out = run(&["randset", "poisson", "--dist", "two-point:4", "--lambda", "4"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn errors_exit_two_with_context() {
    let dir = TempDir::new().unwrap();
    let lat = path(&dir, "bad.lat");
    fs::write(&lat, "3\n0 1\n\n1 x\n").unwrap();
    let out = run(&["lattice", "check", "--lattice", &lat]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));

    let out = run(&["randset", "power-exists", "--dist", "uniform-singleton:3", "--alpha", "abc"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--alpha"));

    let out = run(&["randset", "dist", "--dist", "bogus:1"]);
    assert_eq!(code(&out), 2);
    assert!(out.stdout.is_empty());
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = path(&dir, "a.json");
    let b = path(&dir, "b.json");
    let args = ["scan", "s-set", "--dist", "random:4", "--seed", "17"];
    let first = run(&[&args[..], &["--out", &a, "--threads", "1"]].concat());
    let second = run(&[&args[..], &["--out", &b, "--threads", "4"]].concat());
    assert_eq!(code(&first), code(&second));
    let (ta, tb) = (fs::read_to_string(&a).unwrap(), fs::read_to_string(&b).unwrap());
    let strip = |t: &str| t.lines().filter(|l| !l.contains("\"threads\"") && !l.contains("\"out\"")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(&ta), strip(&tb));
    assert!(Path::new(&a).exists());
    let again = run(&[&args[..], &["--out", &a, "--threads", "1"]].concat());
    assert_eq!(code(&again), code(&first));
    assert_eq!(fs::read_to_string(&a).unwrap(), ta);
}
