//! The installed binary: exit codes and output formats.

use std::process::Command;

fn twistres(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_twistres")).args(args).output().expect("binary runs");
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn config(name: &str) -> String {
    format!("{}/../../configs/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn passing_run_exits_zero() {
    let (code, out, _) = twistres(&["--input", &config("weyl.toml"), "--format", "json"]);
    assert_eq!(code, 0, "{out}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["status"], "pass");
    assert_eq!(v["tasks"].as_array().unwrap().len(), 6);
}

#[test]
fn failing_task_exits_one() {
    let (code, out, _) = twistres(&["--task", "preset:lie-sl2-excluded"]);
    assert_eq!(code, 1);
    assert!(out.contains("out of scope"), "{out}");
}

#[test]
fn config_errors_exit_two() {
    let dir = std::env::temp_dir().join(format!("twistres-bad-{}", std::process::id()));
    std::fs::write(&dir, "field = 6\n").unwrap();
    let (code, out, err) = twistres(&["--input", dir.to_str().unwrap()]);
    std::fs::remove_file(&dir).ok();
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.starts_with("error:"), "{err}");
    let (code, _, err) = twistres(&["--input", "/nonexistent/problem.toml"]);
    assert_eq!(code, 2);
    assert!(err.contains("cannot read"));
    let (code, _, _) = twistres(&["--task", "preset:nope"]);
    assert_eq!(code, 2);
}

#[test]
fn json_is_byte_identical_across_runs() {
    let args = ["--task", "preset:flip", "--task", "preset:cyclic-3", "--seed", "11", "--format", "json"];
    let (c1, a, _) = twistres(&args);
    let (c2, b, _) = twistres(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
}
