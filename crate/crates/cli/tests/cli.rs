use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mosaic_core::analysis::analyze;
use mosaic_core::identify::builtin_index;
use mosaic_core::tile::parse_matrix;
use serde_json::Value;

const TREFOIL: &str = "0 2 1 0\n2 10 9 1\n3 9 8 4\n0 3 4 0\n";

fn shell4() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/layouts/shell4.txt")
}

fn mosaic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mosaic")).args(args).output().unwrap()
}

fn ok_json(args: &[&str]) -> Value {
    let out = mosaic(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn identify_matches_engine() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("trefoil.txt");
    std::fs::write(&file, TREFOIL).unwrap();
    let v = ok_json(&["identify", "--matrix", s(&file)]);
    assert_eq!(v["knot"], "3_1");
    let engine = serde_json::to_value(analyze(&parse_matrix(TREFOIL).unwrap(), builtin_index())).unwrap();
    assert_eq!(v, engine);
}

#[test]
fn run_report_compare_verify() {
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one.jsonl");
    let four = dir.path().join("four.jsonl");
    let layout = shell4();

    let stats = ok_json(&["run", "--layout", s(&layout), "--min-crossings", "0", "--out", s(&one)]);
    assert_eq!(stats["enumerated"], 256);
    let mut merged = 0;
    for i in 0..4 {
        let i = i.to_string();
        let st = ok_json(&[
            "run", "--layout", s(&layout), "--out", s(&four), "--shards", "4", "--shard-index", &i, "--sequential",
        ]);
        merged += st["enumerated"].as_u64().unwrap();
    }
    assert_eq!(merged, 256);
    let sorted = |p: &Path| {
        let mut l: Vec<String> = std::fs::read_to_string(p).unwrap().lines().map(String::from).collect();
        l.sort();
        l
    };
    assert_eq!(sorted(&one), sorted(&four));

    let out = mosaic(&["report", "--store", s(&one)]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "mosaic  tiles  knots\n4       12     3_1\n");

    let empty = dir.path().join("empty.jsonl");
    std::fs::write(&empty, "").unwrap();
    let cmp = ok_json(&["compare", "--a", s(&one), "--b", s(&empty)]);
    assert_eq!(cmp["only_a"], serde_json::json!(["3_1"]));
    assert!(!mosaic(&["report", "--store", s(&empty)]).status.success());

    let v = ok_json(&["verify", "--store", s(&one)]);
    assert_eq!(v["mismatches"], serde_json::json!([]));
    let tampered = std::fs::read_to_string(&one).unwrap().replacen("\"3_1\"", "\"4_1\"", 1);
    std::fs::write(&one, tampered).unwrap();
    assert!(!mosaic(&["verify", "--store", s(&one)]).status.success());
}

#[test]
fn bad_inputs_fail_cleanly() {
    let out = mosaic(&["run", "--layout", "/nonexistent/layout.txt", "--out", "/tmp/never.jsonl"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("layout.txt"));
    let out = mosaic(&["run", "--layout", s(&shell4()), "--out", "/tmp/x.jsonl", "--shards", "2", "--shard-index", "2"]);
    assert!(!out.status.success());
}
