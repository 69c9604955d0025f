use std::io::Write;
use std::process::{Command, Output};

use tempfile::NamedTempFile;

const SCENE: &str = r#"{
  "pieces": [{"id": 0, "kind": "tree"}, {"id": 1, "kind": "line"}, {"id": 2, "kind": "l1", "dim": 2}],
  "stretch": {"maps": [
    {"src": 0, "dst": 0, "kind": "identity"},
    {"src": 1, "dst": 1, "kind": "scale", "lambda": "2/1"},
    {"src": 2, "dst": 2, "kind": "identity"}
  ]},
  "points": {
    "f": {"segments": [{"len": "2/1", "piece": 1, "value": ["2/1"], "label": 0}]},
    "g": {"segments": [{"len": "3/1", "piece": 1, "value": ["-3/1"], "label": 0}]},
    "h": {"segments": [{"len": "1/1", "piece": 0, "value": [[1, "1/1"]], "label": 0}]}
  },
  "classes": {
    "w": {"steps": [
      {"len": "1/1", "piece": 1, "value": ["1/1"]},
      {"len": "1/1", "piece": 0, "value": [[2, "1/1"]]},
      {"len": "2/1", "piece": 2, "value": ["1/1", "-1/1"]}
    ]},
    "bad": {"steps": [
      {"len": "1/1", "piece": 0, "value": [[1, "1/1"]]},
      {"len": "1/1", "piece": 0, "value": [[2, "1/1"]]}
    ]}
  }
}"#;

fn file(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treegraded"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone())
        .unwrap()
        .trim_end()
        .to_string()
}

#[test]
fn dist_prints_a_rational() {
    let s = file(SCENE);
    let path = s.path().to_str().unwrap();
    let o = run(&["dist", "--scene", path, "f", "g"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "\"5/1\"");
    assert_eq!(
        stdout(&run(&["dist", "--scene", path, "f", "f"])),
        "\"0/1\""
    );
    assert_eq!(
        stdout(&run(&["dist", "--scene", path, "f", "h"])),
        "\"3/1\""
    );
}

#[test]
fn foreign_pieces_exit_two() {
    let s = file(SCENE);
    let path = s.path().to_str().unwrap();
    let foreign = r#"{"segments":[{"len":"1/1","piece":7,"value":["1/1"],"label":0}]}"#;
    let o = run(&["dist", "--scene", path, "f", foreign]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("piece 7"));
    assert_eq!(
        run(&["dist", "--scene", path, "f", "nobody"]).status.code(),
        Some(2)
    );
}

#[test]
fn geodesic_evaluation() {
    let s = file(SCENE);
    let path = s.path().to_str().unwrap();
    let mid = run(&["geodesic", "--scene", path, "f", "g", "1"]);
    assert_eq!(
        stdout(&mid),
        r#"{"segments":[{"label":0,"len":"1/1","piece":1,"value":["1/1"]}]}"#
    );
    assert_eq!(
        stdout(&run(&["geodesic", "--scene", path, "f", "g", "2"])),
        r#"{"segments":[]}"#
    );
    assert_eq!(
        run(&["geodesic", "--scene", path, "f", "g", "6"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn project_concat_restrict() {
    let s = file(SCENE);
    let path = s.path().to_str().unwrap();
    let fh = stdout(&run(&["concat", "--scene", path, "f", "h"]));
    assert!(fh.contains(r#""piece":0"#) && fh.contains(r#""piece":1"#));
    let back = run(&["restrict", "--scene", path, &fh, "2"]);
    assert_eq!(
        stdout(&back),
        stdout(&run(&["restrict", "--scene", path, "f", "2"]))
    );
    let basepoint = r#"{"segments":[]}"#;
    let p = run(&[
        "project", "--scene", path, &fh, "--base", basepoint, "--piece", "1", "--label", "0",
    ]);
    assert_eq!(
        stdout(&p),
        r#"{"segments":[{"label":0,"len":"2/1","piece":1,"value":["2/1"]}]}"#
    );
    let other = run(&[
        "project", "--scene", path, &fh, "--base", basepoint, "--piece", "1", "--label", "1",
    ]);
    assert_eq!(stdout(&other), basepoint);
    assert_eq!(
        run(&["restrict", "--scene", path, "h", "1/2"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        run(&["restrict", "--scene", path, "f", "3"]).status.code(),
        Some(2)
    );
}

#[test]
fn stretch_uses_scene_or_file_context() {
    let s = file(SCENE);
    let path = s.path().to_str().unwrap();
    let o = run(&["stretch", "--scene", path, "f"]);
    assert_eq!(
        stdout(&o),
        r#"{"segments":[{"label":0,"len":"4/1","piece":1,"value":["4/1"]}]}"#
    );
    let ctx = file(
        r#"{"maps":[{"src":1,"dst":1,"kind":"scale","lambda":"3/2"},
                    {"src":0,"dst":0,"kind":"identity"},{"src":2,"dst":2,"kind":"identity"}]}"#,
    );
    let o = run(&[
        "stretch",
        "--scene",
        path,
        "--context",
        ctx.path().to_str().unwrap(),
        "g",
    ]);
    assert_eq!(
        stdout(&o),
        r#"{"segments":[{"label":0,"len":"9/2","piece":1,"value":["-9/2"]}]}"#
    );
    let partial = file(r#"{"maps":[{"src":1,"dst":1,"kind":"identity"}]}"#);
    let o = run(&[
        "stretch",
        "--scene",
        path,
        "--context",
        partial.path().to_str().unwrap(),
        "g",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn realize_labels() {
    let s = file(SCENE);
    let path = s.path().to_str().unwrap();
    let o = run(&["realize", "--scene", path, "w", "--labels", "0,1,2"]);
    assert_eq!(o.status.code(), Some(0));
    let pts: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(pts.as_array().unwrap().len(), 3);
    assert_eq!(
        run(&["realize", "--scene", path, "bad", "--labels", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["realize", "--scene", path, "w", "--labels", "1,1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn check_is_seeded_and_reproducible() {
    let s = file(SCENE);
    let path = s.path().to_str().unwrap();
    let a = run(&[
        "check",
        "metric",
        "--scene",
        path,
        "--samples",
        "200",
        "--seed",
        "7",
    ]);
    let b = run(&[
        "check",
        "metric",
        "--scene",
        path,
        "--samples",
        "200",
        "--seed",
        "7",
    ]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let report: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(report["suite"], "metric");
    assert!(report["results"]
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["violations"] == serde_json::json!([])));
    assert_ne!(
        run(&["check", "metric", "--scene", path, "--samples", "10"])
            .status
            .code(),
        Some(0)
    );
    for suite in ["geodesic", "projections", "stretch"] {
        let o = run(&[
            "check",
            suite,
            "--scene",
            path,
            "--samples",
            "100",
            "--seed",
            "3",
        ]);
        assert_eq!(o.status.code(), Some(0), "{suite}");
    }
}

#[test]
fn check_realtree_refuses_mixed_family() {
    let s = file(SCENE);
    let o = run(&[
        "check",
        "realtree",
        "--scene",
        s.path().to_str().unwrap(),
        "--seed",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let trees = file(r#"{"pieces":[{"id":0,"kind":"tree"}]}"#);
    let o = run(&[
        "check",
        "realtree",
        "--scene",
        trees.path().to_str().unwrap(),
        "--seed",
        "1",
        "--samples",
        "100",
    ]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn verify_graph_exit_codes() {
    let bowtie = file(
        r#"{"n":5,"edges":[[0,1,"1/1"],[1,2,"1/1"],[0,2,"1/1"],[2,3,"1/1"],[3,4,"1/1"],[2,4,"1/1"]],"pieces":[[0,1,2],[2,3,4]]}"#,
    );
    let o = run(&["verify-graph", bowtie.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), r#"{"accepted":true,"violations":[]}"#);

    let square = file(
        r#"{"n":4,"edges":[[0,1,"1/1"],[1,2,"1/1"],[2,3,"1/1"],[3,0,"1/1"]],"pieces":[[0,1],[2,3]]}"#,
    );
    let o = run(&[
        "verify-graph",
        "--cap",
        "10000",
        square.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("\"P'2\""));

    let singles = file(
        r#"{"n":4,"edges":[[0,1,"1/1"],[1,2,"1/1"],[2,3,"1/1"],[3,0,"1/1"]],"pieces":[[0],[1],[2],[3]]}"#,
    );
    let o = run(&[
        "verify-graph",
        "--cap",
        "1",
        singles.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}
