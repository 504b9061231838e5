//! End-to-end tests of the CLI surface through `run(argv)`.

use cubiclab_cli::run;
use serde_json::Value;

fn ok(args: &[&str]) -> String {
    let (code, out) = run(args.iter().copied());
    assert_eq!(code, 0, "expected success for {args:?}, got:\n{out}");
    out
}

fn ok_json(args: &[&str]) -> Value {
    let mut v = vec!["--json"];
    v.extend_from_slice(args);
    let out = ok(&v);
    serde_json::from_str(&out).expect("valid JSON output")
}

#[test]
fn eval_named_value() {
    let out = ok(&["eval", "--k", "5", "--form", "F", "--point", "0,0,1"]);
    assert!(out.contains("-1"), "{out}");
    let v = ok_json(&["eval", "--k", "5", "--form", "F", "--point", "0,0,1"]);
    assert_eq!(v["outputs"]["value"], Value::from(-1.0));
    assert_eq!(v["op"], "eval");
}

#[test]
fn eval_rational_points() {
    let v = ok_json(&["eval", "--k", "-2", "--form", "F", "--point", "1/3,1/3,1"]);
    let val = v["outputs"]["value"].as_f64().unwrap();
    assert!((val + 1.0 / 3.0).abs() < 1e-15);
}

#[test]
fn eval_degenerate_guard_exit_code_one() {
    let (code, out) = run(["eval", "--k", "1", "--form", "F", "--point", "1,1,1"]);
    assert_eq!(code, 1);
    assert!(out.contains("DegenerateParameter"), "{out}");
    // with the flag the degenerate member evaluates fine
    let (code, _) = run([
        "eval",
        "--k",
        "1",
        "--form",
        "F",
        "--point",
        "1,1,1",
        "--allow-degenerate",
    ]);
    assert_eq!(code, 0);
}

#[test]
fn parse_error_exit_code_two() {
    let (code, _) = run(["eval", "--nope", "1"]);
    assert_eq!(code, 2);
    let (code, _) = run(["no-such-subcommand"]);
    assert_eq!(code, 2);
}

#[test]
fn siblings_boundary() {
    let v = ok_json(&["siblings", "--kprime", "1", "--allow-boundary"]);
    let s: Vec<f64> = v["outputs"]["siblings"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert!((s[0] + 2.0).abs() < 1e-12 && (s[1] + 2.0).abs() < 1e-12 && (s[2] - 1.0).abs() < 1e-12);
    let (code, _) = run(["siblings", "--kprime", "1"]);
    assert_eq!(code, 1);
}

#[test]
fn components_counts() {
    let v = ok_json(&["components", "--k", "5"]);
    assert_eq!(v["outputs"]["components"].as_array().unwrap().len(), 4);
    let v = ok_json(&["components", "--k", "-2"]);
    assert_eq!(v["outputs"]["components"].as_array().unwrap().len(), 3);
}

#[test]
fn steinian_of_b3() {
    let v = ok_json(&["steinian", "--k", "5", "--point", "1,-1,0"]);
    let img: Vec<f64> = v["outputs"]["image"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    // R = (5/8, 5/8, 1) up to sup-normalization: (5/8, 5/8, 1)
    assert!((img[0] - 0.625).abs() < 1e-12 && (img[1] - 0.625).abs() < 1e-12);
}

#[test]
fn group_and_two_torsion() {
    let v = ok_json(&["group", "--k", "5", "--p1", "0,1,0", "--p2", "1,0,0"]);
    let s: Vec<f64> = v["outputs"]["sum"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert!((s[0] - 1.0).abs() < 1e-9 && (s[1] + 1.0).abs() < 1e-9 && s[2].abs() < 1e-9);
    let v = ok_json(&["two-torsion", "--k", "5"]);
    assert_eq!(v["outputs"]["count"], Value::from(1));
}

#[test]
fn zeros_report() {
    let v = ok_json(&["zeros", "--k", "5", "--a", "-1,3"]);
    assert_eq!(v["outputs"]["sampled"]["b1r"], Value::from(1));
    assert_eq!(v["outputs"]["agree"], Value::from(true));
}

#[test]
fn visible_examples() {
    // a C2-part ray far up the branch (near B1) is visible from A=(−1,3,1),
    // which has H(A) > 0 ...
    let v = ok_json(&["visible", "--k", "5", "--a", "-1,3", "--d0", "0.3834,50,1"]);
    assert_eq!(v["outputs"]["visible"], Value::from(true));
    // ... while a C2-part ray far along the other end (near B2) is not
    // visible from A=(−2,1,1), which has H(A) < 0
    let v = ok_json(&["visible", "--k", "5", "--a", "-2,1", "--d0", "50,0.3834,1"]);
    assert_eq!(v["outputs"]["visible"], Value::from(false));
    // a ray nowhere near the boundary is rejected
    let (code, out) = run(["visible", "--k", "5", "--a", "-1,3", "--d0", "5,5,1"]);
    assert_eq!(code, 1);
    assert!(out.contains("NotOnBoundary"), "{out}");
}

#[test]
fn classify_fermat_cases() {
    let v = ok_json(&["classify-fermat", "--a", "0.3,0.3"]);
    assert_eq!(v["outputs"]["case_id"], Value::from(2));
    let v = ok_json(&["classify-fermat", "--a", "-1,0.5"]);
    assert_eq!(v["outputs"]["case_id"], Value::from(6));
}

#[test]
fn km2_values_and_bound_check() {
    let v = ok_json(&["km2", "--mu", "1/4", "--samples", "60"]);
    assert!((v["outputs"]["t_mu"].as_f64().unwrap() - 0.15139).abs() < 1e-4);
    assert!((v["outputs"]["s_mu"].as_f64().unwrap() - 0.875).abs() < 1e-12);
    let v = ok_json(&[
        "km2",
        "--mu",
        "1",
        "--samples",
        "40",
        "--check-bound",
        "3,2",
        "--c2",
        "1,1,1",
        "--d",
        "1,1,1",
        "--e",
        "2,0,0",
    ]);
    assert_eq!(v["outputs"]["bound_check"]["holds"], Value::from(true));
}

#[test]
fn lambda_and_pole() {
    let v = ok_json(&["lambda-bound", "--k", "5", "--e", "0,0,1", "--d", "1/3,1/3,1"]);
    assert_eq!(v["outputs"]["method"], Value::from("CubicRoots"));
    assert!(v["outputs"]["lambda0"].as_f64().unwrap() > 1.0);
    // pole round-trip through the CLI
    let v = ok_json(&["pole", "--k", "5", "--l", "0.1,0.1,0.4"]);
    assert!(v["residuals"]["covector_sup"].as_f64().unwrap() < 1e-9);
}

#[test]
fn enumerate_ray_window() {
    let v = ok_json(&[
        "enumerate",
        "--k",
        "-2",
        "--bound",
        "10",
        "--range",
        "1,9",
        "--region",
        "ray:-1,-1,-3",
    ]);
    assert_eq!(v["outputs"]["count"], Value::from(1));
}

#[test]
fn figure_preset_to_file() {
    let dir = std::env::temp_dir().join("cubiclab-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("fig1.svg");
    let p = path.to_str().unwrap();
    let out = ok(&["figure", "--preset", "fig1", "--out", p]);
    assert!(out.contains("wrote"));
    let svg = std::fs::read_to_string(&path).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("</svg>"));
}

#[test]
fn figure_explicit_spec() {
    let v = ok_json(&[
        "figure", "--k", "5", "--viewport", "-1,2,-1,2", "--layers", "cubic,asymptotes",
    ]);
    assert!(v["outputs"]["bytes"].as_u64().unwrap() > 500);
}

#[test]
fn verify_single_criterion_deterministic() {
    let (code, a) = run(["verify", "--suite", "8", "--seed", "7"]);
    assert_eq!(code, 0, "{a}");
    assert!(a.contains("PASS  8"));
    let (_, b) = run(["verify", "--suite", "8", "--seed", "7"]);
    assert_eq!(a, b);
}

#[test]
fn json_round_trip_reinvocation() {
    // parsing the JSON and re-invoking with the echoed inputs reproduces
    // identical output
    let v = ok_json(&["eval", "--k", "5", "--form", "F", "--point", "0.21,0.34,1"]);
    let k = v["inputs"]["k"].as_f64().unwrap();
    let p = v["inputs"]["point"].as_array().unwrap();
    let point = format!(
        "{},{},{}",
        p[0].as_f64().unwrap(),
        p[1].as_f64().unwrap(),
        p[2].as_f64().unwrap()
    );
    let v2 = ok_json(&["eval", "--k", &format!("{k}"), "--form", "F", "--point", &point]);
    assert_eq!(v, v2);
}

#[test]
fn tol_override() {
    // loosening the on-curve tolerance lets a slightly-off point through
    let (code, _) = run(["steinian", "--k", "5", "--point", "0.625001,0.625,1"]);
    assert_eq!(code, 1);
    let (code2, _) = run([
        "--tol",
        "on_curve_abs=0.1",
        "--tol",
        "kernel_rank_rel=1e-3",
        "steinian",
        "--k",
        "5",
        "--point",
        "0.625001,0.625,1",
    ]);
    assert_eq!(code2, 0);
    // unknown tolerance name is an argument error
    let (code3, _) = run(["--tol", "bogus=1", "eval", "--k", "5", "--point", "0,0,1"]);
    assert_eq!(code3, 2);
}
