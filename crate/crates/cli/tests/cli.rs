use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_schnyder-morph"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const K4: &str = r#"{"n": 4, "exterior": [0, 1, 2], "faces": [[3, 1, 0], [3, 2, 1], [3, 0, 2]]}"#;

#[test]
fn gen_is_deterministic() {
    let a = run(&["gen", "--n", "50", "--seed", "7"]);
    let b = run(&["gen", "--n", "50", "--seed", "7"]);
    let c = run(&["gen", "--n", "50", "--seed", "8"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let t: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(t["n"], 50);
    assert_eq!(t["faces"].as_array().unwrap().len(), 95);
}

#[test]
fn draw_k4() {
    let dir = tempfile::tempdir().unwrap();
    let t = path(dir.path(), "k4.json");
    fs::write(&t, K4).unwrap();
    let o = run(&["draw", "--input", s(&t)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let d: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(d["W"], 3);
    assert_eq!(d["coords"]["3"], serde_json::json!([1, 1, 1]));
}

#[test]
fn morph_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n| path(dir.path(), n);
    let gen = run(&[
        "gen",
        "--n",
        "14",
        "--seed",
        "3",
        "--out",
        s(&p("t.json")),
        "--wood-out",
        s(&p("b.json")),
        "--weights-out",
        s(&p("wb.json")),
    ]);
    assert_eq!(code(&gen), 0);
    assert_eq!(code(&run(&["wood", "--input", s(&p("t.json")), "--out", s(&p("a.json"))])), 0);
    let svg = p("frames");
    let o = run(&[
        "morph",
        "--input",
        s(&p("t.json")),
        "--wood-a",
        s(&p("a.json")),
        "--wood-b",
        s(&p("b.json")),
        "--weights-b",
        s(&p("wb.json")),
        "--out",
        s(&p("plan.json")),
        "--samples",
        "2",
        "--svg",
        s(&svg),
        "--trajectories",
        "--frames",
        s(&p("frames.json")),
        "--manifest",
        s(&p("manifest.json")),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let plan: Value = serde_json::from_str(&fs::read_to_string(p("plan.json")).unwrap()).unwrap();
    let steps = plan["steps"].as_array().unwrap();
    assert!(steps.iter().all(|st| st["certified"] == true));
    assert_eq!(fs::read_dir(&svg).unwrap().count(), 3 * steps.len());
    let frames: Value = serde_json::from_str(&fs::read_to_string(p("frames.json")).unwrap()).unwrap();
    assert_eq!(frames["frames"].as_array().unwrap().len(), 3 * steps.len());
    let manifest: Value = serde_json::from_str(&fs::read_to_string(p("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "morph");
    assert_eq!(manifest["samples"], 2);

    let v = run(&["verify", "--plan", s(&p("plan.json"))]);
    assert_eq!(code(&v), 0, "{}", String::from_utf8_lossy(&v.stderr));

    // push vertex 3 of the first target drawing onto a corner
    let mut bad = plan.clone();
    let w = bad["W"].as_i64().unwrap();
    bad["steps"][0]["to"]["coords"]["3"] = serde_json::json!([w, 0, 0]);
    bad["steps"][1]["from"]["coords"]["3"] = serde_json::json!([w, 0, 0]);
    fs::write(p("bad.json"), serde_json::to_string(&bad).unwrap()).unwrap();
    let v = run(&["verify", "--plan", s(&p("bad.json"))]);
    assert_eq!(code(&v), 2);
    assert!(String::from_utf8_lossy(&v.stderr).contains("collapses"));
}

#[test]
fn recognize_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n| path(dir.path(), n);
    run(&["gen", "--n", "12", "--seed", "1", "--out", s(&p("t.json")), "--wood-out", s(&p("a.json")), "--weights-out", s(&p("w.json"))]);
    let d = run(&["draw", "--input", s(&p("t.json")), "--wood", s(&p("a.json")), "--weights", s(&p("w.json")), "--out", s(&p("d.json"))]);
    assert_eq!(code(&d), 0);
    let o = run(&["recognize", "--input", s(&p("t.json")), "--coords", s(&p("d.json"))]);
    assert_eq!(code(&o), 0);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["verdict"], "WeightedSchnyder");
    let w: Value = serde_json::from_str(&fs::read_to_string(p("w.json")).unwrap()).unwrap();
    let expect: Vec<String> = w["weights"].as_array().unwrap().iter().map(|x| format!("{x}/1")).collect();
    assert_eq!(r["weights"], serde_json::json!(expect));
}

#[test]
fn flips_and_sequences() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n| path(dir.path(), n);
    run(&["gen", "--n", "10", "--seed", "5", "--out", s(&p("t.json")), "--wood-out", s(&p("b.json"))]);
    run(&["wood", "--input", s(&p("t.json")), "--out", s(&p("a.json"))]);
    let f = run(&["flips", "--input", s(&p("t.json")), "--wood", s(&p("b.json"))]);
    assert_eq!(code(&f), 0);
    let lists: Value = serde_json::from_slice(&f.stdout).unwrap();
    assert!(lists["flips"].is_array() && lists["flops"].is_array());
    let q = run(&["flipseq", "--input", s(&p("t.json")), "--wood-a", s(&p("a.json")), "--wood-b", s(&p("b.json"))]);
    assert_eq!(code(&q), 0);
    let seq: Value = serde_json::from_slice(&q.stdout).unwrap();
    for e in seq.as_array().unwrap() {
        assert!(e["direction"] == "flip" || e["direction"] == "flop");
    }
    let check = run(&["wood", "--input", s(&p("t.json")), "--check", s(&p("b.json"))]);
    assert_eq!(code(&check), 0);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n| path(dir.path(), n);
    fs::write(p("k4.json"), K4).unwrap();
    // wrong colour into a1
    fs::write(
        p("bad_wood.json"),
        r#"{"edges": [{"tail": 3, "head": 0, "colour": 2}, {"tail": 3, "head": 1, "colour": 1}, {"tail": 3, "head": 2, "colour": 3}]}"#,
    )
    .unwrap();
    let o = run(&["wood", "--input", s(&p("k4.json")), "--check", s(&p("bad_wood.json"))]);
    assert_eq!(code(&o), 1);
    fs::write(p("euler.json"), r#"{"n": 5, "exterior": [0, 1, 2], "faces": [[3, 1, 0], [3, 2, 1], [3, 0, 2]]}"#).unwrap();
    assert_eq!(code(&run(&["draw", "--input", s(&p("euler.json"))])), 1);
    assert_eq!(code(&run(&["draw", "--input", s(&p("missing.json"))])), 3);
    fs::write(p("garbage.json"), "{not json").unwrap();
    assert_eq!(code(&run(&["draw", "--input", s(&p("garbage.json"))])), 3);
}

#[test]
fn help_lists_every_subcommand() {
    let o = run(&["--help"]);
    let text = String::from_utf8_lossy(&o.stdout);
    for cmd in ["wood", "draw", "flips", "flipseq", "morph", "verify", "recognize", "gen"] {
        assert!(text.contains(cmd), "{cmd}");
    }
}
