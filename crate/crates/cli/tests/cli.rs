use std::path::Path;
use std::process::{Command, Output};

fn brcert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_brcert"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for out in [&a, &b] {
        let o = brcert(&["gen", "--rank", "4", "--dims", "3,3,4", "--seed", "7", "-o", path(out)]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let c = dir.path().join("c.json");
    brcert(&["gen", "--rank", "4", "--dims", "3,3,4", "--seed", "8", "-o", path(&c)]);
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
}

#[test]
fn rank_four_sample_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.json");
    let report = dir.path().join("r.json");
    brcert(&["gen", "--rank", "4", "--seed", "7", "-o", path(&t)]);
    let o = brcert(&["check", path(&t), "--variety", "334", "--route", "b", "-o", path(&report)]);
    assert_eq!(o.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["verdict"], "MEMBER");
    assert_eq!(json["route"], "B");
}

#[test]
fn dense_sample_is_rejected_in_every_mode() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.json");
    brcert(&["gen", "--kind", "dense", "--seed", "3", "-o", path(&t)]);
    for args in [
        vec!["--route", "a"],
        vec!["--route", "full"],
        vec!["--mode", "modp"],
        vec!["--mode", "float"],
    ] {
        let mut all = vec!["check", path(&t)];
        all.extend(args.iter().copied());
        assert_eq!(brcert(&all).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn matmul_tensor_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("m.json");
    brcert(&["gen", "--kind", "matmul", "--dims", "4,4,4", "-o", path(&t)]);
    let o = brcert(&["check", path(&t), "--variety", "444"]);
    assert_eq!(o.status.code(), Some(1));
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(json["verdict"], "NON_MEMBER");
    let first = json["stages"].as_array().unwrap().iter().find(|s| s["pass"] == false).unwrap();
    assert_eq!(first["witness"]["kind"], "strassen");
}

#[test]
fn usage_and_data_errors_exit_2() {
    let o = brcert(&["check", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert_eq!(brcert(&["check", "/nonexistent/file.json"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("m.json");
    brcert(&["gen", "--kind", "matmul", "--dims", "4,4,4", "-o", path(&t)]);
    // Float mode is limited to the 3x3x4 degree-6 route.
    assert_eq!(brcert(&["check", path(&t), "--mode", "float"]).status.code(), Some(2));
    assert_eq!(brcert(&["gen", "--kind", "matmul"]).status.code(), Some(2));
}

#[test]
fn restricted_audit_and_small_cross_run_succeed() {
    assert_eq!(brcert(&["derive", "restricted"]).status.code(), Some(0));
    let o = brcert(&["verify", "cross", "--positives", "2", "--negatives", "2", "--special", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(json["cases"], 10);
    assert_eq!(json["agreements"], 10);
}

#[test]
fn empty_cross_plan_succeeds() {
    let o = brcert(&["verify", "cross", "--positives", "0", "--negatives", "0", "--special", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(json["cases"], 0);
}
