use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn doc(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "foliations", &format!("{name}.fol")]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn folhol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_folhol"))
        .args(args)
        .env_remove("FOLHOL_TOL")
        .output()
        .unwrap()
}

fn with_json(args: &[&str]) -> (Output, Value) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let mut all: Vec<&str> = args.to_vec();
    let p = path.to_string_lossy().into_owned();
    all.extend(["--json", &p]);
    let out = folhol(&all);
    let json = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    (out, json)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn f(v: &Value) -> f64 {
    v.as_str().unwrap().parse().unwrap()
}

#[test]
fn fiber_of_first_vanishing_order_family_at_origin() {
    let (out, json) = with_json(&["fiber", &doc("vanishing_order_1"), "--point", "0,0"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("fiber 4, tangent 0, isotropy 4"));
    let data = &json["results"][0]["data"];
    assert_eq!(data["dim_fiber"], 4);
    assert_eq!(data["dim_tangent"], 0);
    assert_eq!(data["dim_isotropy"], 4);
    assert_eq!(json["results"][0]["outcome"], "ok");
}

#[test]
fn report_has_the_documented_top_level_keys() {
    let (_, json) = with_json(&["classify", &doc("rotation"), "--point", "1/2,0"]);
    let keys: Vec<&String> = json.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["input", "results", "tolerances", "tool", "version"]);
    assert_eq!(json["tool"], "folhol");
    let r = &json["results"][0];
    for k in ["analysis", "params", "outcome", "data"] {
        assert!(r.get(k).is_some(), "{k}");
    }
    assert_eq!(r["data"]["class"], "regular");
}

#[test]
fn rationals_and_floats_are_encoded_as_strings() {
    let (_, json) = with_json(&["fiber", &doc("rotation"), "--point", "-1/2,3"]);
    assert_eq!(json["results"][0]["data"]["point"][0], serde_json::json!({"num": "-1", "den": "2"}));
    let tol = json["tolerances"]["comparison"].as_str().unwrap();
    let mantissa = tol.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
    assert_eq!(mantissa.len(), 17, "{tol}");
}

#[test]
fn several_points_give_one_result_each_in_order() {
    let (out, json) = with_json(&["classify", &doc("euler"), "--point", "1", "--point", "0", "--point", "-2"]);
    assert_eq!(out.status.code(), Some(0));
    let classes: Vec<&str> = json["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["data"]["class"].as_str().unwrap())
        .collect();
    assert_eq!(classes, ["regular", "singular", "regular"]);
}

#[test]
fn torus_plane_is_involutive_with_the_displayed_brackets() {
    let (out, json) = with_json(&["involutivity", &doc("torus_plane")]);
    assert_eq!(out.status.code(), Some(0));
    let data = &json["results"][0]["data"];
    assert_eq!(data["status"], "involutive");
    let text = stdout(&out);
    for line in [
        "[v1, v2] = -w1 + w2",
        "[v1, w1] = t2*w1",
        "[v1, w2] = -t2*w1 + t2*w2",
        "[w1, w2] = -t1*t2*w1 + t1*t2*w2",
    ] {
        assert!(text.contains(line), "{line}\n{text}");
    }
}

#[test]
fn holonomy_at_zero_is_the_identity_on_every_example() {
    let docs = [
        "closed_form",
        "euler",
        "euler_quadratic",
        "flat_line",
        "horizontal",
        "rotation",
        "torus_plane",
        "torus_plane_slice",
        "vanishing_order_1",
        "vanishing_order_2",
    ];
    for name in docs {
        let (out, json) = with_json(&["holonomy", &doc(name), "--point", "0", "--xi", "0"]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", stdout(&out));
        let m = json["results"][0]["data"]["full_jacobian"].as_array().unwrap();
        for (i, row) in m.iter().enumerate() {
            for (j, v) in row.as_array().unwrap().iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((f(v) - expected).abs() < 1e-12, "{name}");
            }
        }
    }
}

#[test]
fn lambda_goes_through_the_local_group_morphism() {
    let (out, json) = with_json(&["holonomy", &doc("rotation"), "--point", "0,0", "--lambda", "1/2"]);
    assert_eq!(out.status.code(), Some(0));
    let m = &json["results"][0]["data"]["full_jacobian"];
    assert!((f(&m[0][0]) - 0.5f64.cos()).abs() < 1e-7);
    assert!((f(&m[1][0]) - 0.5f64.sin()).abs() < 1e-7);
}

#[test]
fn analysis_errors_are_embedded_with_exit_code_one() {
    let (out, json) = with_json(&["holonomy", &doc("rotation"), "--point", "0,0", "--lambda", "5"]);
    assert_eq!(out.status.code(), Some(1));
    let r = &json["results"][0];
    assert_eq!(r["outcome"], "error");
    assert!(r["data"]["message"].as_str().unwrap().contains("validity"));
}

#[test]
fn parse_errors_exit_with_two_and_a_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.fol");
    std::fs::write(&path, "foliation bad {\n  gen X = d(x);\n}\n").unwrap();
    let out = folhol(&["involutivity", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("1:1: chart declaration required"), "{err}");
}

#[test]
fn malformed_flags_exit_with_two() {
    assert_eq!(folhol(&["fiber", &doc("rotation"), "--point", "0,0,0"]).status.code(), Some(2));
    assert_eq!(folhol(&["fiber", &doc("rotation"), "--point", "a,b"]).status.code(), Some(2));
    assert_eq!(folhol(&["probe-discreteness", &doc("rotation"), "--point", "0,0", "--slice", "nope"]).status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let args = ["isotropy", &doc("vanishing_order_1"), "--point", "0,0", "--point", "1,2"];
    let (a, ja) = with_json(&args);
    let (b, jb) = with_json(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(serde_json::to_string(&ja).unwrap(), serde_json::to_string(&jb).unwrap());
}

#[test]
fn tolerance_comes_from_flag_then_environment() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_folhol"));
        cmd.args(["involutivity", &doc("euler"), "--json", path.to_str().unwrap()]);
        cmd.env_remove("FOLHOL_TOL");
        if let Some(e) = env {
            cmd.env("FOLHOL_TOL", e);
        }
        if let Some(t) = flag {
            cmd.args(["--tol", t]);
        }
        assert!(cmd.output().unwrap().status.success());
        let json: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        f(&json["tolerances"]["comparison"])
    };
    assert_eq!(run(None, None), 1e-6);
    assert_eq!(run(Some("1e-3"), None), 1e-3);
    assert_eq!(run(Some("1e-3"), Some("1e-9")), 1e-9);
}

#[test]
fn kernel_probe_verdicts_on_the_rotation() {
    let (_, json) = with_json(&["probe-kernel", &doc("rotation"), "--point", "0,0", "--xi", "6.283185307179586"]);
    assert_eq!(json["results"][0]["data"]["verdict"], "inconclusive");
    let (_, json) = with_json(&["probe-kernel", &doc("rotation"), "--point", "0,0", "--xi", "1"]);
    assert_eq!(json["results"][0]["data"]["verdict"], "not_in_kernel");
}

#[test]
fn discreteness_probe_radius_for_the_rotation() {
    let (_, json) = with_json(&["probe-discreteness", &doc("rotation"), "--point", "0,0"]);
    let outcome = &json["results"][0]["data"]["outcome"];
    assert_eq!(outcome["kind"], "box");
    assert!((f(&outcome["radius"]) - std::f64::consts::PI).abs() < 1e-6);
    let (_, json) = with_json(&["probe-discreteness", &doc("euler"), "--point", "0"]);
    assert_eq!(json["results"][0]["data"]["outcome"]["kind"], "unbounded");
}

#[test]
fn witness_check_passes_and_fails() {
    let e = doc("euler");
    let ok = ["check-witness", &e, "--point", "0", "--field", "3*t^2*x^2*d(x)", "--witness", "x^2*d(x)"];
    let (out, json) = with_json(&ok);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json["results"][0]["data"]["pass"], true);
    let bad = ["check-witness", &e, "--point", "0", "--field", "x^2*d(x)", "--witness", "2*x^2*d(x)"];
    let (_, json) = with_json(&bad);
    assert_eq!(json["results"][0]["data"]["pass"], false);
    // a field outside I_0 F is an analysis error
    let outside = ["check-witness", &e, "--point", "0", "--field", "x*d(x)", "--witness", "x^2*d(x)"];
    let (out, _) = with_json(&outside);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn algebroid_over_the_torus_leaf() {
    let (out, json) = with_json(&["algebroid", &doc("torus_plane"), "--leaf", "L"]);
    assert_eq!(out.status.code(), Some(0));
    let data = &json["results"][0]["data"];
    assert_eq!(data["anchor"], serde_json::json!(["d(th1)", "d(th2)", "0", "0"]));
    assert_eq!(data["brackets"].as_array().unwrap().len(), 1);
    assert!(stdout(&out).contains("[b0, b1] = -b2 + b3"));
}
