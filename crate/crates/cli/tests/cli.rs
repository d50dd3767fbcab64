use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ndhermite")).args(args).output().expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn csv_rows(out: &Output) -> Vec<Vec<String>> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn exact_build_has_zero_residual() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("model.json");
    let r = ok_json(&["build", &fixture("square_nu2.json"), "--exact", "--expanded", "-o", out.to_str().unwrap()]);
    assert_eq!(r["max_residual"], 0.0);
    assert_eq!(r["conditions"], 16);
    assert_eq!(r["pass"], true);
    let model: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert!(model.get("expanded").is_some());
}

#[test]
fn float_build_passes() {
    let r = ok_json(&["build", &fixture("line7_nu3.json")]);
    assert_eq!(r["mode"], "float");
    assert_eq!(r["pass"], true);
}

#[test]
fn missing_entry_is_an_input_error_naming_the_point() {
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(fixture("square_nu2.json")).unwrap()).unwrap();
    v["points"][2]["t"].as_array_mut().unwrap().pop();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, v.to_string()).unwrap();
    let out = run(&["build", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("(1,0)"), "{err}");
}

#[test]
fn malformed_json_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"dims\": 1,\n \"axes\": [").unwrap();
    let out = run(&["build", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn bilinear_eval_and_derivative() {
    let out = run(&["eval", &fixture("bilinear.json"), &fixture("bilinear_points.csv"), "--deriv", "1,0"]);
    assert!(out.status.success());
    let rows = csv_rows(&out);
    assert_eq!(rows[0], ["x1", "x2", "value", "d_1_0"]);
    // corner mean
    assert_eq!(rows[1][2].parse::<f64>().unwrap(), 3.0);
    // f = 1 + x2 + 2 x1 + 2 x1 x2
    assert_eq!(rows[2][3].parse::<f64>().unwrap(), 2.0);
    assert!((rows[3][2].parse::<f64>().unwrap() - 3.75).abs() < 1e-12);
}

#[test]
fn exact_eval_prints_rationals() {
    let out = run(&["eval", &fixture("bilinear.json"), &fixture("bilinear_points.csv"), "--exact"]);
    assert!(out.status.success());
    let rows = csv_rows(&out);
    assert_eq!(rows[3][2], "15/4");
}

#[test]
fn points_outside_the_hull() {
    let out = run(&["eval", &fixture("bilinear.json"), &fixture("outside_points.csv")]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stdout).contains("outside"));
    let out = run(&["eval", &fixture("bilinear.json"), &fixture("outside_points.csv"), "--skip-outside"]);
    assert!(out.status.success());
    assert_eq!(csv_rows(&out).len(), 2);
}

#[test]
fn bad_points_header_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.csv");
    std::fs::write(&path, "a,b\n0,0\n").unwrap();
    let out = run(&["eval", &fixture("bilinear.json"), path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gauss2d_comparison() {
    let r = ok_json(&["compare", "--function", "gauss2d", "--mult", "2,2", "--baseline"]);
    let rmse = r["rmse"].as_f64().unwrap();
    assert!((rmse - 0.0054).abs() < 0.0054 * 0.25, "{rmse}");
    assert!(r["baseline_rmse"].as_f64().unwrap() > rmse);
    assert_eq!(r["samples"], 51 * 51);
}

#[test]
fn expression_needs_axes() {
    let out = run(&["compare", "--function", "x1*x2"]);
    assert_eq!(out.status.code(), Some(2));
    let r = ok_json(&["compare", "--function", "x1^2*x2", "--axes", "0:2,0:1", "--lattice", "5,5", "--mult", "2,2"]);
    assert!(r["rmse"].as_f64().unwrap() < 1e-12);
}

#[test]
fn division_reproduces_quotients() {
    let r = ok_json(&["divide", &fixture("division_poly.json"), &fixture("division_grid.json"), "--exact"]);
    assert_eq!(r["member"], false);
    let q1 = &r["quotients"][0]["terms"];
    let has = |q: &Value, e: [u32; 3], c: i64| {
        q.as_array().unwrap().iter().any(|t| t["e"] == serde_json::json!(e) && t["c"].to_string().trim_matches('"') == c.to_string())
    };
    assert!(has(q1, [1, 0, 0], 1) && has(q1, [0, 1, 0], -14));
    let q3 = &r["quotients"][2]["terms"];
    assert!(has(q3, [0, 0, 2], 1) && has(q3, [1, 0, 0], 4) && has(q3, [0, 0, 0], 2));
    let gb = ok_json(&["divide", &fixture("division_poly.json"), &fixture("division_grid.json"), "--groebner"]);
    assert_eq!(gb.as_array().map(Vec::len).or_else(|| gb["basis"].as_array().map(Vec::len)), Some(3));
}

#[test]
fn division_order_must_be_a_permutation() {
    let out = run(&["divide", &fixture("division_poly.json"), &fixture("division_grid.json"), "--order", "1,1,2"]);
    assert_eq!(out.status.code(), Some(2));
    let a = ok_json(&["divide", &fixture("division_poly.json"), &fixture("division_grid.json"), "--exact", "--order", "3,1,2"]);
    let b = ok_json(&["divide", &fixture("division_poly.json"), &fixture("division_grid.json"), "--exact"]);
    assert_eq!(a["remainder"], b["remainder"]);
}

#[test]
fn spline_continuity() {
    let r = ok_json(&["verify", &fixture("line7_nu3.json"), "--exact", "--continuity", "--window", "3", "--odd-anchor", "floor"]);
    assert_eq!(r["pass"], true);
    assert_eq!(r["nodes"].as_array().unwrap().len(), 4);
    // round-anchored odd windows switch between nodes
    let out = run(&["verify", &fixture("line7_nu3.json"), "--exact", "--continuity", "--window", "3"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("no window boundary"));
    let out = run(&["verify", &fixture("line7_nu1.json"), "--exact", "--continuity", "--window", "2", "--orders", "1"]);
    assert!(out.status.success());
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["smoothness"], "C0");
}

#[test]
fn resample_plane_through_a_function_grid() {
    let out = run(&[
        "resample", "--function", "sinmix3d", "--window", "3,3,3", "--odd-anchor", "floor", "--step", "1", "--x1", "1:4",
        "--x2", "1:4",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&out);
    assert_eq!(rows[0], ["x1", "x2", "x3", "value", "reference"]);
    assert_eq!(rows.len(), 17);
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let args = |t: &'static str| {
        vec!["--threads", t, "compare", "--function", "gauss3d", "--window", "3,3,3", "--lattice", "7,9,5"]
    };
    let a = run(&args("1"));
    let b = run(&args("3"));
    let c = run(&args("3"));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(b.stdout, c.stdout);
    let e = |t: &'static str| run(&["--threads", t, "eval", &fixture("bilinear.json"), &fixture("bilinear_points.csv")]);
    assert_eq!(e("1").stdout, e("4").stdout);
}
