use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twist-torsion")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let out = run(&all);
    (code(&out), serde_json::from_slice(&out.stdout).expect("valid json"))
}

#[test]
fn present() {
    let (c, v) = json(&["present", "--n", "2"]);
    assert_eq!(c, 0);
    assert_eq!(v["relators"], serde_json::json!(["taTAb", "tbbATBB"]));
    let (c, v) = json(&["present", "--n", "1", "--eliminate-a"]);
    assert_eq!(c, 0);
    assert_eq!(v["relators"], serde_json::json!(["BtbTBTbtb"]));
    assert_eq!(code(&run(&["present", "--n", "0"])), 64);
    assert_eq!(code(&run(&["present", "--n", "-3"])), 64);
}

#[test]
fn cert() {
    let (c, v) = json(&["cert", "--n", "1", "--target", "identity", "--verify", "trace"]);
    assert_eq!(c, 0);
    assert_eq!(v["conjugators"], serde_json::json!(["t", "BTT"]));
    assert_eq!(v["verification"]["trace"]["verdict"], "confirmed");

    let (c, v) = json(&["cert", "--n", "2", "--target", "bn", "--verify", "all"]);
    assert_eq!(c, 0);
    assert_eq!(v["conjugators"].as_array().unwrap().len(), 3);
    assert_eq!(v["verification"]["kb"]["verdict"], "confirmed");
    assert_eq!(v["verification"]["rep"]["consistent"], true);

    let tiny = ["cert", "--n", "8", "--target", "identity", "--verify", "kb", "--max-rules", "10", "--max-iterations", "10"];
    assert_eq!(code(&run(&tiny)), 2);
}

#[test]
fn cert_record_round_trips() {
    let (_, v) = json(&["cert", "--n", "3", "--target", "bninv", "--trace"]);
    let rec: twist_torsion::certificate::CertificateRecord = serde_json::from_value(v).unwrap();
    let cert = rec.to_certificate().unwrap();
    assert!(twist_torsion::certificate::verify_by_trace(&cert).unwrap().is_confirmed());
}

#[test]
fn claims() {
    let out = run(&["claims", "--range", "2..30"]);
    assert_eq!(code(&out), 0);
    let (c, v) = json(&["claims", "--range", "3..3"]);
    assert_eq!(c, 0);
    let ids: Vec<u64> = v["results"].as_array().unwrap().iter().map(|r| r["claim"].as_u64().unwrap()).collect();
    assert_eq!(ids, [1, 2, 3, 4]);
    assert_eq!(code(&run(&["claims", "--range", "5..2"])), 64);
    assert_eq!(code(&run(&["claims", "--range", "x"])), 64);
}

#[test]
fn rep() {
    let (c, v) = json(&["rep", "--n", "1"]);
    assert_eq!(c, 0);
    assert_eq!(v["d_nontrivial"], true);
    assert_eq!(v["seed"], 0);
    let residual: f64 = v["residual"].as_str().unwrap().parse().unwrap();
    assert!(residual < 1e-53);
    let rec: twist_torsion::rep::RepresentationRecord = serde_json::from_value(v).unwrap();
    let back: twist_torsion::RepresentationMp = rec.to_representation().unwrap();
    assert!(back.is_irreducible());
    assert_eq!(code(&run(&["rep", "--n", "1", "--precision", "64"])), 64);
}

#[test]
fn search() {
    let out = run(&["search", "--n", "2", "--candidate", "[b^-1,t]"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("certificate found"));
    assert_eq!(code(&run(&["search", "--n", "1", "--candidate", "t"])), 1);
    let (c, v) = json(&["search", "--n", "1", "--candidate", "D", "--no-transport"]);
    assert_eq!(c, 0);
    assert_eq!(v["transported"], false);
    assert_eq!(v["conjugators"].as_array().unwrap().len(), 2);
    let tight = ["search", "--n", "2", "--candidate", "D", "--no-transport", "--max-conjugates", "1", "--max-length", "1"];
    assert_eq!(code(&run(&tight)), 2);
    assert_eq!(code(&run(&["search", "--n", "1", "--candidate", "b^"])), 64);
}

#[test]
fn word_and_macros() {
    let out = run(&["--let", "X=[b^-1,t]", "word", "X"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("bTBt\n"));
    let (c, v) = json(&["word", "BtbTBTbtb", "--n", "1"]);
    assert_eq!(c, 0);
    assert_eq!(v["trivial"], true);
    let (c, _) = json(&["word", "D", "--n", "1"]);
    assert_eq!(c, 2);
    assert_eq!(code(&run(&["--let", "1x=b", "word", "b"])), 64);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&run(&[])), 64);
    assert_eq!(code(&run(&["frobnicate"])), 64);
    assert_eq!(code(&run(&["cert", "--n", "1", "--target", "nope"])), 64);
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
}

#[test]
fn deterministic_output() {
    let a = run(&["--format", "json", "rep", "--n", "2", "--seed", "5"]);
    let b = run(&["--format", "json", "rep", "--n", "2", "--seed", "5"]);
    assert_eq!(a.stdout, b.stdout);
}
