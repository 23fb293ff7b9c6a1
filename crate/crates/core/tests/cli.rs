//! The `decomp-lab` binary end to end: solve, write the certificate, verify it from disk.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_decomp-lab")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("decomp-lab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn solve_then_verify_from_file() {
    let out = run(&["--format", "json", "solve", "--host", "k_n:7", "--pattern", "triangle"]);
    assert_eq!(out.status.code(), Some(0));
    let rep = json(&out);
    assert_eq!(rep["verdict"], "found");
    let cert = rep["result"]["certificate"].clone();
    assert_eq!(cert["placements"].as_array().unwrap().len(), 7);
    let path = scratch("sts7.json");
    std::fs::write(&path, cert.to_string()).unwrap();
    let p = path.to_str().unwrap();
    let ok = run(&["verify", "--host", "k_n:7", "--pattern", "triangle", "--certificate", p]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stdout));

    let mut short = cert;
    short["placements"].as_array_mut().unwrap().pop();
    std::fs::write(&path, short.to_string()).unwrap();
    let bad = run(&["--format", "json", "verify", "--host", "k_n:7", "--pattern", "triangle", "--certificate", p]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(json(&bad)["verdict"], "false");
}

#[test]
fn resolvable_design_round_trip() {
    let out = run(&["--format", "json", "solve", "--host", "resolvable:9", "--partite"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let design = json(&out)["result"]["design"].clone();
    assert_eq!(design["kind"], "resolvable-STS");
    assert_eq!(design["classes"].as_array().unwrap().len(), 4);
    let path = scratch("kirkman9.json");
    std::fs::write(&path, design.to_string()).unwrap();
    let v = run(&["verify", "--certificate", path.to_str().unwrap(), "--n", "9"]);
    assert_eq!(v.status.code(), Some(0));
}

#[test]
fn nibble_trajectories_are_reproducible() {
    let (a, b) = (scratch("t1.jsonl"), scratch("t2.jsonl"));
    for p in [&a, &b] {
        let out = run(&["nibble", "--host", "k3n:8", "--seed", "11", "--trajectory-out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(!ta.is_empty());
    assert_eq!(ta, tb);
}

#[test]
fn input_errors_exit_three() {
    let out = run(&["solve", "--host", "k3n:x", "--pattern", "triangle"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("position 4"));
    assert_eq!(run(&["solve"]).status.code(), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
