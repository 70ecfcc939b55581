use std::process::{Command, Output};

use serde_json::Value;

fn qmf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmf")).args(args).env_remove("QMF_NU_CAP").output().expect("run qmf")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut full = vec!["--no-timing"];
    full.extend_from_slice(args);
    let out = qmf(&full);
    let v: Value = serde_json::from_slice(&out.stdout).expect("JSON on stdout");
    (v, out.status.code().expect("exit code"))
}

fn plain(args: &[&str]) -> String {
    let mut full = vec!["--format", "plain"];
    full.extend_from_slice(args);
    String::from_utf8(qmf(&full).stdout).unwrap().trim_end().to_string()
}

#[test]
fn expansions() {
    assert_eq!(plain(&["expand", "theta", "--prec", "10"]), "1 + 2q + 2q^4 + 2q^9");
    assert_eq!(plain(&["expand", "eisenstein:4", "--prec", "3"]), "1 + 240q + 2160q^2");
    assert_eq!(plain(&["expand", "--form", "f2", "--prec", "4"]), "q + 4q^3");
}

#[test]
fn json_envelope_and_determinism() {
    let args = ["decompose", "theta*eisenstein:4"];
    let (v, code) = json(&args);
    assert_eq!(code, 0);
    assert_eq!(v["command"], "decompose");
    assert_eq!(v["runtime_ms"], 0);
    assert!(v["version"].is_string());
    assert_eq!(v["results"][0]["polynomial"], "X^9 + 224*X^5*Y + 256*X*Y^2");
    assert_eq!(v["results"][0]["weight"], "9/2");

    let a = qmf(&["--no-timing", "romik", "0..6"]).stdout;
    let b = qmf(&["--no-timing", "romik", "0..6"]).stdout;
    assert_eq!(a, b);
}

#[test]
fn romik_values_are_strings() {
    let (v, code) = json(&["romik", "0..3"]);
    assert_eq!(code, 0);
    let d: Vec<&str> = v["results"].as_array().unwrap().iter().map(|r| r["d"].as_str().unwrap()).collect();
    assert_eq!(d, ["1", "1", "-1", "51"]);
}

#[test]
fn verify_romik_congruence() {
    let (v, code) = json(&["verify", "thm1.5", "--p", "7", "--m", "2", "--range", "25..30"]);
    assert_eq!(code, 0);
    assert_eq!(v["verified"], true);
    assert_eq!(v["inputs"]["bound"], 25);
    for r in v["results"].as_array().unwrap() {
        assert!(r["ord"].as_str().unwrap().parse::<u32>().unwrap() >= 2);
    }
    let (_, code) = json(&["verify", "romik-mod-p", "--p", "7", "--range", "25..27"]);
    assert_eq!(code, 0);
}

#[test]
fn failing_claim_exits_one() {
    let (v, code) = json(&["verify", "eisenstein-cm", "--p", "7", "--range", "0..2"]);
    assert_eq!(code, 1);
    assert_eq!(v["verified"], false);
    assert_eq!(v["results"][1]["value"], "-16704");
}

#[test]
fn nu_of_high_derivative() {
    let (v, code) = json(&["nu", "--form", "theta", "--n", "25", "--p", "5"]);
    assert_eq!(code, 0);
    assert!(v["results"][0]["lower_bound"].as_u64().unwrap() >= 2);

    let out = Command::new(env!("CARGO_BIN_EXE_qmf"))
        .args(["--no-timing", "nu", "theta", "--p", "5"])
        .env("QMF_NU_CAP", "3")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["inputs"]["cap"], 3);
}

#[test]
fn filtration_and_deriv() {
    let (v, _) = json(&["filtration", "theta*eisenstein:4", "--p", "5"]);
    assert_eq!(v["results"][0]["filtration"], "1/2");
    assert_eq!(v["results"][0]["drops"], 1);
    let (v, _) = json(&["deriv", "eisenstein:6", "--n", "1"]);
    assert_eq!(v["results"][0]["cm_value"], "-16704");
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(json(&["expand", "delta"]).1, 2);
    assert_eq!(json(&["nu", "theta", "--p", "4"]).1, 2);
    assert_eq!(json(&["decompose", "theta", "--k", "2"]).1, 2);
    assert_eq!(json(&["filtration", "eisenstein:2", "--p", "5"]).1, 2);
    assert_eq!(qmf(&["romik"]).status.code(), Some(2));
    assert_eq!(qmf(&["romik", "3..1"]).status.code(), Some(2));
}

#[test]
fn oracle_check_small() {
    let (v, code) = json(&["oracle-check", "--n-max", "3", "--digits", "60"]);
    assert_eq!(code, 0, "{v}");
    assert!(v["results"].as_array().unwrap().iter().all(|r| r["agrees"] == true));
}
