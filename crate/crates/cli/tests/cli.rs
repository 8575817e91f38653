use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sparse-embed"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p.to_str().unwrap().to_owned()
}

fn triangle() -> Value {
    json!({"d": 1, "V": 3, "simplices": [[0], [1], [2], [0, 1], [1, 2], [0, 2]]})
}

#[test]
fn embed_triangle_is_certified() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "k3.json", &triangle());
    let out = dir.path().join("k3.emb.json");
    let o = run(&["embed", "--input", &input, "--m", "1", "--n", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let cert: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(cert["skeletal_ok"], json!(true));

    let o = run(&["verify", "--input", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));

    let obj = dir.path().join("k3.obj");
    let o = run(&["export", "--input", out.to_str().unwrap(), "--format", "obj", "--out", obj.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(std::fs::read_to_string(obj).unwrap().contains("\nl "));
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{not json").unwrap();
    let out = dir.path().join("o.json");
    let o = run(&["embed", "--input", p.to_str().unwrap(), "--m", "1", "--n", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn m_above_n_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "k3.json", &triangle());
    let out = dir.path().join("o.json");
    let o = run(&["embed", "--input", &input, "--m", "4", "--n", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
}

#[test]
fn verify_detects_skeletal_failure() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "k3.json", &triangle());
    let out = dir.path().join("k3.emb.json");
    run(&["embed", "--input", &input, "--m", "1", "--n", "2", "--out", out.to_str().unwrap()]);
    let mut map: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    map["images"]["0,1"] = json!([{"type": "chain", "dim": 2, "cells": [{"anchor": [0, 0], "axes": [0, 1]}]}]);
    let bad = write(dir.path(), "bad.json", &map);
    let o = run(&["verify", "--input", &bad]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn width_embed_and_svg_export() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "path.json", &json!({"d": 1, "V": 4, "simplices": [[0, 1], [1, 2], [2, 3]]}));
    let heights = write(dir.path(), "h.json", &json!({"heights": {"0": [0, 1], "1": [1, 3], "2": [2, 3], "3": [1, 1]}}));
    let out = dir.path().join("w.json");
    let o = run(&["width-embed", "--input", &input, "--heights", &heights, "--n", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let emb: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(emb["width_report"]["measured_width"], json!(1));
    let svg = dir.path().join("w.svg");
    let o = run(&["export", "--input", out.to_str().unwrap(), "--format", "svg", "--out", svg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(svg).unwrap().matches("<path").count(), 3);
}

#[test]
fn export_rejects_high_dimension() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "k3.json", &triangle());
    let out = dir.path().join("k3.emb.json");
    run(&["embed", "--input", &input, "--m", "1", "--n", "5", "--out", out.to_str().unwrap()]);
    let svg = dir.path().join("k3.svg");
    let o = run(&["export", "--input", out.to_str().unwrap(), "--format", "svg", "--out", svg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bench_is_deterministic_and_needs_three_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let r1 = dir.path().join("r1.json");
    let r2 = dir.path().join("r2.json");
    for r in [&r1, &r2] {
        let o = run(&[
            "bench", "--family", "cycle", "--sizes", "8,16,32", "--m", "1", "--n", "3", "--seed", "5",
            "--report", r.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(std::fs::read(&r1).unwrap(), std::fs::read(&r2).unwrap());

    let o = run(&[
        "bench", "--family", "path", "--sizes", "8,16", "--n", "3", "--report", r1.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}
