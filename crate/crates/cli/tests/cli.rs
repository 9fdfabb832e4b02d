use std::process::{Command, Output};

use serde_json::Value;

const CUBIC: &str = "3*x1^3 - 2*x1^2*x2 + 5*x1*x2^2 + x2^3 - 4*x1^2*x3 + 7*x1*x2*x3 - 3*x2^2*x3 \
    + 2*x1*x3^2 - 6*x2*x3^2 + 5*x3^3 + 2*x1^2 - x1*x2 + 3*x2^2 + 4*x1*x3 - 5*x2*x3 + x3^2 \
    - 7*x1 + 2*x2 + 3*x3 - 1";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypercurv")).args(args).output().expect("binary runs")
}

fn schema() -> jsonschema::JSONSchema {
    let text = include_str!("../../../docs/run_report.schema.json");
    let value: Value = serde_json::from_str(text).unwrap();
    jsonschema::JSONSchema::compile(&value).unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let s = schema();
    if let Err(errors) = s.validate(&v) {
        let msgs: Vec<String> = errors.map(|e| e.to_string()).collect();
        panic!("{args:?} violates the schema: {msgs:?}");
    }
    v
}

fn counts(v: &Value) -> (Value, Value) {
    (v["counts"]["complex"].clone(), v["counts"]["real"].clone())
}

fn magnitudes(v: &Value) -> Vec<f64> {
    v["result"]["magnitudes"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn curvature_on_ellipsoid_and_sphere() {
    let v = json(&["curvature", "--quadric", "1,2,4", "--point", "1,0,0"]);
    let m = magnitudes(&v);
    assert!((m[0] - 2.0).abs() < 1e-12 && (m[1] - 4.0).abs() < 1e-12, "{m:?}");

    let v = json(&["curvature", "--poly", "x1^2 + x2^2 + x3^2 - 1", "--point", "0,0.6,0.8"]);
    for k in magnitudes(&v) {
        assert!((k - 1.0).abs() < 1e-12);
    }
}

#[test]
fn off_surface_point_is_rejected() {
    let out = run(&["curvature", "--quadric", "1,2,4", "--point", "1,1,0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not on the surface"));
}

#[test]
fn bad_input_exit_codes() {
    assert_eq!(run(&["umbilics", "--quadric", "1,x,4"]).status.code(), Some(2));
    assert_eq!(run(&["umbilics", "--quadric", "1,2"]).status.code(), Some(2));
    assert_eq!(run(&["umbilics"]).status.code(), Some(2));
    assert_eq!(run(&["counts", "--degree", "1"]).status.code(), Some(2));
    assert_eq!(run(&["flexes", "--poly", "x1^2 + x2^2 - x3^2"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn quadric_umbilics() {
    let v = json(&["umbilics", "--quadric", "1,2,4"]);
    assert_eq!(counts(&v), (12.into(), 4.into()));
    assert_eq!(v["closed_form"]["agreement"], true);
    let v = json(&["umbilics", "--quadric", "-1,2,4"]);
    assert_eq!(counts(&v), (12.into(), 0.into()));
    assert_eq!(v["closed_form"]["agreement"], true);
}

#[test]
fn degenerate_quadrics_have_infinitely_many() {
    for cmd in ["umbilics", "critcurv"] {
        let v = json(&[cmd, "--quadric", "1,1,2"]);
        assert_eq!(v["counts"]["infinite"], true);
        assert_eq!(v["counts"]["complex"], Value::Null);
    }
}

#[test]
fn cubic_umbilics() {
    let v = json(&["umbilics", "--poly", CUBIC, "--seed", "7"]);
    assert_eq!(v["counts"]["complex"], 84);
}

#[test]
fn quadric_critical_curvature() {
    let v = json(&["critcurv", "--quadric", "1,2,4"]);
    assert_eq!(counts(&v), (18.into(), 10.into()));
    assert_eq!(v["result"]["all_in_coordinate_planes"], true);
    assert_eq!(v["closed_form"]["agreement"], true);
    assert!(v["points"].as_array().unwrap().iter().all(|p| p["in_coordinate_plane"] == true));
}

#[test]
fn general_critical_curvature_respects_budget() {
    let out = run(&["critcurv", "--poly", CUBIC]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--budget"));
}

#[test]
fn fermat_flexes() {
    let v = json(&["flexes", "--poly", "x1^3 + x2^3 + x3^3"]);
    assert_eq!(counts(&v), (9.into(), 3.into()));
}

#[test]
fn degree_counts() {
    let expect = [(2, Some(12), "498", 18, true), (3, Some(84), "3573", 456, false), (4, None, "11328", 1808, false)];
    for (d, umb, bound, known, exact) in expect {
        let v = json(&["counts", "--degree", &d.to_string()]);
        let l = &v["ledger"];
        if let Some(u) = umb {
            assert_eq!(l["salmon"]["umbilics"], u);
        }
        assert_eq!(l["cc_upper_bound"], bound);
        assert_eq!(l["known_cc"]["value"], known);
        assert_eq!(l["known_cc"]["exact"], exact);
    }
    let v = json(&["counts", "--degree", "5"]);
    assert_eq!(v["ledger"]["known_cc"], Value::Null);
}

#[test]
fn chow_dump() {
    let v = json(&["chow", "--degree", "3"]);
    assert_eq!(v["ledger"]["deg_y"], "147");
    assert_eq!(v["ledger"]["deg_y_symbolic"], "15*d^3 - 36*d^2 + 22*d");
    assert_eq!(v["ledger"]["identities_hold"], true);
}

#[test]
fn csv_matches_json() {
    let v = json(&["umbilics", "--quadric", "-2,-1,4"]);
    let out = run(&["umbilics", "--quadric", "-2,-1,4", "--format", "csv"]);
    assert!(out.status.success());
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    let mut complex = None;
    let mut real = None;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        match &rec[0] {
            "counts.complex" => complex = Some(rec[1].to_string()),
            "counts.real" => real = Some(rec[1].to_string()),
            _ => {}
        }
    }
    assert_eq!(complex.unwrap(), v["counts"]["complex"].to_string());
    assert_eq!(real.unwrap(), v["counts"]["real"].to_string());
    assert_eq!(v["counts"]["real"], 4);
}

#[test]
fn json_is_byte_identical_across_runs_and_workers() {
    let base = run(&["umbilics", "--quadric", "1,2,4", "--seed", "3"]).stdout;
    for threads in ["1", "2", "3"] {
        let again = run(&["umbilics", "--quadric", "1,2,4", "--seed", "3", "--threads", threads]).stdout;
        assert_eq!(base, again, "threads = {threads}");
    }
}

#[test]
fn output_file_and_timing() {
    let dir = std::env::temp_dir().join(format!("hypercurv-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = run(&["counts", "--degree", "2", "--timing", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(v["wall_time_s"].as_f64().unwrap() >= 0.0);
    let plain = json(&["counts", "--degree", "2"]);
    assert!(plain.get("wall_time_s").is_none());
    std::fs::remove_dir_all(&dir).unwrap();
}
