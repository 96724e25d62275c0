use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use jsonschema::JSONSchema;
use serde_json::{json, Value};

use hypext::io::{read_map, read_space};
use hypext::pq::{pq_ratio, PQParams};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(name: &str) -> String {
    root().join("fixtures").join(name).display().to_string()
}

fn hypext(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypext"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn assert_schema(name: &str, instance: &Value) {
    let path = root()
        .join("docs/schemas")
        .join(format!("{name}.schema.json"));
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let compiled = JSONSchema::compile(&schema).expect("schema compiles");
    if let Err(errors) = compiled.validate(instance) {
        let msgs: Vec<String> = errors
            .map(|e| format!("{} at {}", e, e.instance_path))
            .collect();
        panic!("{name} schema violations: {msgs:#?}");
    };
}

fn snowflake_args<'a>(cmd: &'a str, paths: &'a [String; 3]) -> Vec<&'a str> {
    vec![
        cmd, "--input", &paths[0], "--target", &paths[1], "--map", &paths[2],
    ]
}

fn snowflake_paths() -> [String; 3] {
    [
        fixture("line20.csv"),
        fixture("line20_sqrt.csv"),
        fixture("line20_sqrt_map.json"),
    ]
}

#[test]
fn validate_one_point() {
    let out = hypext(&["validate", "--input", &fixture("one_point.csv")]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_schema("validate", &v);
    assert_eq!(v["diam"], 0.0);
    assert_eq!(v["points"], 1);
    assert!(v["min_pos_dist"].is_null());
}

#[test]
fn validate_reports_triangle_violation() {
    let out = hypext(&["validate", "--input", &fixture("triangle_violation.csv")]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_schema("validate", &v);
    assert_eq!(v["passed"], false);
    assert_eq!(
        v["violation"],
        json!({"kind": "triangle", "points": [0, 1, 2]})
    );
}

#[test]
fn validate_json_points_input() {
    let out = hypext(&["validate", "--input", &fixture("grid3x3_points.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["points"], 9);
}

/// Two points at distance 1 with `r = 1/6`: `k₀ = −1` (the only `k` with
/// `1 < 6^{-k}` maximal), both level-0 balls of radius 2 are the whole space,
/// and level 1 separates the points since `2/6 < 1`.
#[test]
fn build_two_point_matches_hand_construction() {
    let out = hypext(&["build", "--input", &fixture("two_point.csv"), "--r", "1/6"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_schema("graph", &v);
    let expected = json!({
        "r": 1.0 / 6.0,
        "k_min": -1,
        "k_max": 1,
        "edge_rule": "pointset",
        "labels": ["a", "b"],
        "vertices": [
            {"id": 0, "level": -1, "center": 0, "ball": [0, 1], "radius": 12.0},
            {"id": 1, "level": 0, "center": 0, "ball": [0, 1], "radius": 2.0},
            {"id": 2, "level": 1, "center": 0, "ball": [0], "radius": 2.0 / 6.0},
            {"id": 3, "level": 1, "center": 1, "ball": [1], "radius": 2.0 / 6.0},
        ],
        "edges": [
            {"u": 0, "v": 1, "kind": "radial"},
            {"u": 1, "v": 2, "kind": "radial"},
            {"u": 1, "v": 3, "kind": "radial"},
        ],
    });
    assert_eq!(v, expected);
}

#[test]
fn build_dot_and_text() {
    let dot = hypext(&[
        "build",
        "--input",
        &fixture("grid4x4.csv"),
        "--format",
        "dot",
    ]);
    assert_eq!(dot.status.code(), Some(0));
    let dot = String::from_utf8(dot.stdout).unwrap();
    assert!(dot.starts_with("graph approximation {"));
    assert!(dot.contains("style=solid"));
    assert!(dot.trim_end().ends_with('}'));

    let text = hypext(&[
        "build",
        "--input",
        &fixture("two_point.csv"),
        "--format",
        "text",
    ]);
    let text = String::from_utf8(text.stdout).unwrap();
    assert!(text.starts_with("levels -1..=1, 4 vertices, 3 edges"));
}

#[test]
fn build_options_change_the_graph() {
    let base = stdout_json(&hypext(&["build", "--input", &fixture("line12.csv")]));
    let deeper = stdout_json(&hypext(&[
        "build",
        "--input",
        &fixture("line12.csv"),
        "--k-max",
        "5",
    ]));
    assert_eq!(deeper["k_max"], 5);
    assert!(
        deeper["vertices"].as_array().unwrap().len() > base["vertices"].as_array().unwrap().len()
    );

    let dist = stdout_json(&hypext(&[
        "build",
        "--input",
        &fixture("line12.csv"),
        "--edge-rule",
        "distance",
    ]));
    assert_eq!(dist["edge_rule"], "distance");

    let tenth = stdout_json(&hypext(&[
        "build",
        "--input",
        &fixture("line12.csv"),
        "--r",
        "1/10",
    ]));
    assert_eq!(tenth["r"], 0.1);
}

#[test]
fn analyze_corpus_fixtures() {
    for name in [
        "line12.csv",
        "grid4x4.csv",
        "tree2x4.csv",
        "tree3x2.csv",
        "cantor3.csv",
        "cantor4.csv",
        "cantor5.csv",
    ] {
        for r in ["1/6", "1/10"] {
            let out = hypext(&["analyze", "--input", &fixture(name), "--r", r]);
            let v = stdout_json(&out);
            assert_schema("analyze", &v);
            assert_eq!(out.status.code(), Some(0), "{name} at r = {r}: {v}");
            assert!(v["hyperbolicity"]["delta"].as_f64().unwrap() <= 1.5);
            assert_eq!(v["hyperbolicity"]["exhaustive"], true);
        }
    }
}

#[test]
fn pipeline_on_snowflake() {
    let paths = snowflake_paths();
    let out = hypext(&snowflake_args("pipeline", &paths));
    let v = stdout_json(&out);
    assert_schema("pipeline", &v);
    assert_eq!(out.status.code(), Some(0), "{v}");
    for side in ["source", "target"] {
        assert!(v[side]["hyperbolicity"]["delta"].as_f64().unwrap() <= 1.5);
    }
    let ext = &v["extend"]["extension"];
    let c_prime = ext["derived_constants"]["C_prime"].as_f64().unwrap();
    assert!(ext["qi_estimate"]["C_emp"].as_f64().unwrap() <= c_prime);
    assert_eq!(v["check_pq"]["pq"]["params"]["p"], 2.0);
}

#[test]
fn extend_text_lists_every_claim() {
    let paths = snowflake_paths();
    let mut args = snowflake_args("extend", &paths);
    args.extend(["--format", "text"]);
    let out = hypext(&args);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for line in [
        "boundary-trace: PASS",
        "claim1-maximality: PASS",
        "branch-distance: PASS",
        "tie-break-stability: PASS",
        "monotone-level: PASS",
        "degenerate-ray-isometry: PASS",
        "quasi-isometry: PASS",
    ] {
        assert!(text.contains(line), "missing {line:?} in\n{text}");
    }
}

#[test]
fn extend_with_lambda_override() {
    let paths = snowflake_paths();
    let mut args = snowflake_args("extend", &paths);
    args.extend(["--lambda", "3"]);
    let out = hypext(&args);
    let v = stdout_json(&out);
    assert_schema("extend", &v);
    assert_eq!(v["diam_ratio_params"]["lambda"], 3.0);
    assert_eq!(v["extension"]["qi_estimate"]["lambda_used"], 3.0);
}

#[test]
fn identity_map_defaults() {
    let out = hypext(&["check-pq", "--input", &fixture("line12.csv")]);
    let v = stdout_json(&out);
    assert_schema("check_pq", &v);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(v["pq"]["params"], json!({"p": 1.0, "q": 1.0}));
}

#[test]
fn scrambled_map_fails_with_reevaluable_witness() {
    let (space, map) = (fixture("line8.csv"), fixture("line8_scrambled_map.json"));
    let out = hypext(&[
        "check-pq", "--input", &space, "--map", &map, "--q", "1", "--p-grid", "1,2,4",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_schema("check_pq", &v);

    let s = read_space(&space).unwrap();
    let f = read_map(&map, &s, &s).unwrap();
    let checks = v["pq"]["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 3);
    for c in checks {
        let rep = &c["report"];
        assert_eq!(rep["passed"], false);
        let params = PQParams::new(c["params"]["p"].as_f64().unwrap(), 1.0).unwrap();
        let w = &rep["witness"];
        let idx = |k: &str| w[k].as_u64().unwrap() as usize;
        let ratio = pq_ratio(&f, params, idx("x"), idx("a"), idx("b"));
        assert_eq!(ratio, rep["worst_ratio"].as_f64().unwrap());
        assert!(ratio > 1.0);
    }

    let ext = hypext(&[
        "extend", "--input", &space, "--map", &map, "--q", "1", "--p-grid", "1,2,4",
    ]);
    assert_eq!(ext.status.code(), Some(1));
    assert_schema("extend", &stdout_json(&ext));
}

#[test]
fn input_errors_exit_2() {
    let cases: Vec<Vec<String>> = vec![
        vec!["build".into(), "--input".into(), fixture("missing.csv")],
        vec!["build".into(), "--input".into(), fixture("one_point.csv")],
        vec![
            "build".into(),
            "--input".into(),
            fixture("two_point.csv"),
            "--r".into(),
            "0.5".into(),
        ],
        vec![
            "build".into(),
            "--input".into(),
            fixture("line12.csv"),
            "--k-max".into(),
            "-9".into(),
        ],
        vec![
            "analyze".into(),
            "--input".into(),
            fixture("triangle_violation.csv"),
        ],
        vec![
            "check-pq".into(),
            "--input".into(),
            fixture("line12.csv"),
            "--map".into(),
            fixture("line20_sqrt_map.json"),
        ],
        vec![
            "analyze".into(),
            "--input".into(),
            fixture("line12.csv"),
            "--format".into(),
            "dot".into(),
        ],
    ];
    for args in cases {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = hypext(&refs);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        // clap reports its own usage errors in plain text.
        if let Ok(err) = serde_json::from_slice::<Value>(&out.stderr) {
            assert_schema("error", &err);
        } else {
            assert!(
                String::from_utf8_lossy(&out.stderr).contains("--r"),
                "{args:?}"
            );
        }
    }
}

#[test]
fn single_point_build_is_degenerate() {
    let out = hypext(&["build", "--input", &fixture("one_point.csv")]);
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["message"]
        .as_str()
        .unwrap()
        .contains("fewer than two points"));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let paths = snowflake_paths();
    let mut runs = Vec::new();
    for i in 0..2 {
        let out = dir.path().join(format!("run{i}.json"));
        let out_str = out.display().to_string();
        let mut args = snowflake_args("pipeline", &paths);
        args.extend(["--seed", "7", "--out", &out_str]);
        let status = hypext(&args);
        assert_eq!(status.status.code(), Some(0));
        assert!(status.stdout.is_empty());
        runs.push(std::fs::read(&out).unwrap());
    }
    assert!(!runs[0].is_empty());
    assert_eq!(runs[0], runs[1]);

    let a = hypext(&[
        "build",
        "--input",
        &fixture("cantor5.csv"),
        "--format",
        "dot",
    ]);
    let b = hypext(&[
        "build",
        "--input",
        &fixture("cantor5.csv"),
        "--format",
        "dot",
    ]);
    assert_eq!(a.stdout, b.stdout);
}
