use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn pequiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pequiv"))
        .args(args)
        .arg("--fixtures")
        .arg(fixtures())
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(pequiv(&["validate", "d_f"]).status.code(), Some(0));
    assert_eq!(pequiv(&["validate", "triangle"]).status.code(), Some(2));
    assert_eq!(pequiv(&["validate", "no_such_movie"]).status.code(), Some(1));
    assert_eq!(pequiv(&["compare", "torus", "sphere"]).status.code(), Some(3));
    assert_eq!(pequiv(&["invariant", "d_f", "--polarity", "1"]).status.code(), Some(2));
    assert_eq!(pequiv(&["invariant", "d_f", "--polarity", "12"]).status.code(), Some(2));
    assert_eq!(pequiv(&["frobnicate"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.movie");
    std::fs::write(&bad, "movie bad\nbirth a component=s orient=+\nend\n").unwrap();
    assert_eq!(pequiv(&["validate", path(&bad)]).status.code(), Some(2));
}

#[test]
fn compare_verdicts() {
    let out = pequiv(&["compare", "d_f", "d_f_prime"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "DISTINGUISHED");
    let out = pequiv(&["compare", "d_f", "d_f"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "INCONCLUSIVE");
}

#[test]
fn reports_are_byte_stable_and_ordered() {
    let a = pequiv(&["invariant", "d_f"]).stdout;
    let b = pequiv(&["invariant", "d_f"]).stdout;
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    let keys: Vec<&str> = text
        .lines()
        .filter_map(|l| l.strip_prefix("  \""))
        .filter_map(|l| l.split_once('"').map(|(k, _)| k))
        .collect();
    assert_eq!(
        keys,
        ["schema", "tool", "command", "movie", "validation", "surface", "decker", "colorings", "invariant"]
    );
    let sphere = json(&pequiv(&["invariant", "sphere"]));
    assert_eq!(sphere["invariant"]["key"], serde_json::json!([[[0, 0]]]));
    let timed = json(&pequiv(&["invariant", "d_f", "--timing"]));
    assert!(timed["timing"]["invariant"].is_number());
}

#[test]
fn selected_polarity() {
    let v = json(&pequiv(&["invariant", "d_f", "--polarity", "00"]));
    assert_eq!(v["invariant"]["selected_polarity"], "00");
    assert_eq!(v["invariant"]["canonical_polarity"], "11");
}

#[test]
fn apply_move_round_trip_through_reports() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s.json");
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    assert!(pequiv(&["surface", "torus_finger", "--report", path(&s)]).status.success());
    let listed = json(&pequiv(&["apply-move", path(&s), "--list"]));
    let moves = listed["applicable_moves"].as_array().unwrap();
    assert!(!moves.is_empty());
    for i in 0..moves.len() {
        let idx = i.to_string();
        let out = pequiv(&["apply-move", path(&s), "--index", &idx, "--report", path(&a)]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let after: Value = serde_json::from_str(&std::fs::read_to_string(&a).unwrap()).unwrap();
        assert_eq!(after["move"]["invariant_preserved"], true);
        let inverse = after["move"]["inverse"].to_string();
        let out = pequiv(&["apply-move", path(&a), "--move", &inverse, "--report", path(&b)]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let back: Value = serde_json::from_str(&std::fs::read_to_string(&b).unwrap()).unwrap();
        let orig: Value = serde_json::from_str(&std::fs::read_to_string(&s).unwrap()).unwrap();
        assert_eq!(back["surface"], orig["surface"]);
    }
    let bogus = r#"{"kind":"III","direction":"reverse","location":{"at":"loops","upper":0,"lower":0}}"#;
    assert_eq!(pequiv(&["apply-move", path(&s), "--move", bogus]).status.code(), Some(2));
    assert_eq!(pequiv(&["apply-move", path(&s), "--move", "{"]).status.code(), Some(2));
}

#[test]
fn triple_points_are_refused_by_every_computing_command() {
    for cmd in ["surface", "decker", "invariant"] {
        assert_eq!(pequiv(&[cmd, "triangle"]).status.code(), Some(2), "{cmd}");
    }
    assert_eq!(pequiv(&["compare", "triangle", "d_f"]).status.code(), Some(2));
    assert_eq!(pequiv(&["apply-move", "triangle", "--list"]).status.code(), Some(2));
}
