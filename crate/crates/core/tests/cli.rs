//! The `ncg` binary end to end: exit codes, output shape and determinism.

mod common;

use std::path::{Path, PathBuf};
use std::process::Command;

use ncg::profile::write_profile;

use common::{q, rotational_cycle};

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn ncg(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ncg")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let star = write(dir.path(), "star.txt", "ncg 4 3/1\n0: 1 2 3\n1:\n2:\n3:\n");
    let tri = write(dir.path(), "tri.txt", "ncg 3 3/1\n0: 1\n1: 2\n2: 0\n");
    let bad = write(dir.path(), "bad.txt", "ncg 3 x\n");

    let (code, out) = ncg(&["verify", s(&star)]);
    assert_eq!(code, 0);
    assert!(out.contains("status: equilibrium"), "{out}");

    let (code, out) = ncg(&["verify", s(&tri)]);
    assert_eq!(code, 2);
    assert!(out.contains("witness: player 0 drop {1}: delta -2"), "{out}");

    assert_eq!(ncg(&["verify", s(&bad)]).0, 1);
    assert_eq!(ncg(&["verify", s(&star), "--mode", "family"]).0, 3);

    let (code, out) = ncg(&["verify", s(&tri), "--format", "jsonl"]);
    assert_eq!(code, 2);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["status"], "not-equilibrium");
}

#[test]
fn audit_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let tree = write(dir.path(), "tree.txt", "ncg 4 72/1\n0: 1 2 3\n1:\n2:\n3:\n");
    let c16 = write(dir.path(), "c16.txt", &write_profile(&rotational_cycle(16, q(80))));

    let (code, out) = ncg(&["audit", s(&tree)]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("tree-theorem: pass"), "{out}");

    let (code, out) = ncg(&["audit", s(&c16), "--format", "jsonl"]);
    assert_eq!(code, 2);
    let fails: Vec<String> = out
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap())
        .filter(|v| v["verdict"] == "fail")
        .map(|v| v["check"].as_str().unwrap().to_string())
        .collect();
    assert!(fails.contains(&"two-paths".to_string()) && fails.contains(&"degree-lower".to_string()), "{fails:?}");

    let (code, out) = ncg(&["audit", s(&tree), "--checks", "girth", "--format", "jsonl"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 1);
    assert_eq!(ncg(&["audit", s(&tree), "--checks", "no-such-check"]).0, 1);
    assert_eq!(ncg(&["audit", s(&tree), "--dau-c", "4"]).0, 1);
}

#[test]
fn search_table_and_limits() {
    let (code, out) = ncg(&["search", "--n", "3", "--alpha", "3", "--table", "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(out, "n,alpha,ne_classes,max_cost,opt_cost,poa,all_trees\n3,3/1,3,14/1,14/1,1/1,true\n");
    assert_eq!(ncg(&["search", "--n", "7", "--alpha", "1"]).0, 4);
    assert_eq!(ncg(&["search", "--n", "5", "--alpha", "1", "--no-symmetry"]).0, 4);
}

#[test]
fn dynamics_from_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let tri = write(dir.path(), "tri.txt", "ncg 3 3/1\n0: 1\n1: 2\n2: 0\n");
    let (code, out) = ncg(&["search", "--dynamics", s(&tri)]);
    assert_eq!(code, 0);
    assert!(out.starts_with("round 1: player 0 -> {} delta -2\n"), "{out}");
    assert!(out.contains("status: converged"), "{out}");
    let (code, _) = ncg(&["search", "--dynamics", s(&tri), "--max-rounds", "0"]);
    assert_eq!(code, 3);
}

#[test]
fn outputs_are_deterministic_across_thread_counts() {
    let args = ["search", "--n", "5", "--alpha", "1,2,n", "--format", "csv"];
    let base = ncg(&args);
    for threads in ["1", "3"] {
        let out = Command::new(env!("CARGO_BIN_EXE_ncg")).args(args).env("NCG_THREADS", threads).output().unwrap();
        assert_eq!(String::from_utf8(out.stdout).unwrap(), base.1, "NCG_THREADS={threads}");
    }
}
