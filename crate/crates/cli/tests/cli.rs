use std::path::PathBuf;
use std::process::{Command, Output};

use qmodular::exact::Rational;
use serde_json::Value;

fn qmf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmf"))
        .args(args)
        .output()
        .expect("run qmf")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn tmp(name: &str, contents: &[u8]) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qmf-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn rat(v: &Value) -> Rational {
    v.as_str().unwrap().parse().unwrap()
}

#[test]
fn eigenpoly_depth_one() {
    let out = qmf(&["eigenpoly", "--a", "1", "--b", "1", "--c", "0", "--k", "12", "--d", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["roots"], serde_json::json!(["0", "10"]));
    assert_eq!(v["liftable"], serde_json::json!(["0"]));
}

#[test]
fn eigenpoly_generic_and_weight_two() {
    let v = json_of(&qmf(&["eigenpoly", "--a", "1/3", "--b", "5/2", "--c", "1/4", "--k", "17/5", "--d", "1"]));
    assert_eq!(v["roots"], serde_json::json!(["0", "7/5"]));
    assert_eq!(v["liftable"], serde_json::json!(["0", "7/5"]));
    let v = json_of(&qmf(&["eigenpoly", "--a", "3", "--b", "2", "--c", "5/2", "--k", "2", "--d", "1"]));
    assert_eq!(v["liftable"], serde_json::json!([]));
}

#[test]
fn rc_trivial_bracket() {
    let out = qmf(&["rc", "--n", "0", "--k", "4", "--d", "0", "--l", "6", "--e", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let c: Vec<Rational> = v["coefficients"].as_array().unwrap().iter().map(rat).collect();
    assert_eq!(c, vec![Rational::one()]);
}

#[test]
fn rc_applied_to_eisenstein_series() {
    let e4 = qmf(&["--order", "12", "forms", "emit", "--name", "E4"]);
    let e6 = qmf(&["--order", "12", "forms", "emit", "--name", "E6"]);
    let f = tmp("e4.json", &e4.stdout);
    let g = tmp("e6.json", &e6.stdout);
    let out = qmf(&[
        "rc", "--n", "1", "--k", "4", "--d", "0", "--l", "6", "--e", "0", "--apply",
        f.to_str().unwrap(), g.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["bracket"]["weight"], "12/1");
    assert_eq!(v["bracket"]["components"].as_array().unwrap().len(), 1);
}

#[test]
fn suites() {
    let out = qmf(&["--seed", "3", "suite", "--name", "sl2", "--depth", "4", "--draws", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["seed"], 3);
    assert_eq!(v["passed"], true);

    // the literal index in (ii) fails; the corrected one passes
    let out = qmf(&["suite", "--name", "commutators", "--depth", "3", "--draws", "6"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    let status = |prefix: &str| {
        v["reports"]
            .as_array()
            .unwrap()
            .iter()
            .find(|r| r["relation"].as_str().unwrap().starts_with(prefix))
            .unwrap()["status"]
            .clone()
    };
    assert_eq!(status("(ii) "), "fail");
    assert_eq!(status("(ii') "), "pass");
    for p in ["(i) ", "(iii) ", "(iv) ", "(v) ", "(vi) "] {
        assert_eq!(status(p), "pass", "{p}");
    }
}

#[test]
fn suite_is_deterministic() {
    let a = qmf(&["--seed", "11", "suite", "--name", "eigen", "--depth", "2", "--draws", "2"]);
    let b = qmf(&["--seed", "11", "suite", "--name", "eigen", "--depth", "2", "--draws", "2"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn transformation_checks() {
    let e2 = qmf(&["forms", "emit", "--name", "E2", "--qm"]);
    let f = tmp("e2qm.json", &e2.stdout);
    for gamma in ["0,-1,1,0", "1,1,0,1", "1,-1,1,0"] {
        let out = qmf(&["verify-transform", f.to_str().unwrap(), "--gamma", gamma, "--tau", "2i", "--tol", "1e-6"]);
        assert_eq!(out.status.code(), Some(0), "{gamma}");
        assert_eq!(json_of(&out)["status"], "pass");
    }
    // E2 alone is not modular
    let e2h = qmf(&["forms", "emit", "--name", "E2"]);
    let f = tmp("e2.json", &e2h.stdout);
    let out = qmf(&["verify-transform", f.to_str().unwrap(), "--gamma", "0,-1,1,0", "--tau", "1+2i"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_of(&out)["status"], "fail");
}

#[test]
fn lift_then_verify() {
    let out = qmf(&["lift", "--a", "1/3", "--b", "5/2", "--c", "1/4", "--k", "17/5", "--d", "1", "--lambda", "7/5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["verified"], true);
    let t = tmp("lift.json", serde_json::to_string(&v["tuple"]).unwrap().as_bytes());
    let ok = qmf(&["verify-eigen", "--a", "1/3", "--b", "5/2", "--c", "1/4", "--lambda", "7/5", t.to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = qmf(&["verify-eigen", "--a", "1/3", "--b", "5/2", "--c", "1/4", "--lambda", "1", t.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(json_of(&bad)["passed"], false);
    let report = tmp("lift_report.json", &out.stdout);
    let direct = qmf(&["verify-eigen", "--a", "1/3", "--b", "5/2", "--c", "1/4", "--lambda", "7/5", report.to_str().unwrap()]);
    assert_eq!(direct.status.code(), Some(0));

    let out = qmf(&["lift", "--a", "1/3", "--b", "5/2", "--c", "1/4", "--k", "17/5", "--d", "1", "--lambda", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn apply_roundtrip() {
    let e2 = qmf(&["--order", "8", "forms", "emit", "--name", "E2", "--qm"]);
    let f = tmp("e2small.json", &e2.stdout);
    let t = qmf(&["apply", "--op", "to-tuple", f.to_str().unwrap()]);
    assert_eq!(t.status.code(), Some(0));
    let tf = tmp("e2tuple.json", &t.stdout);
    let back = qmf(&["apply", "--op", "to-qm", tf.to_str().unwrap()]);
    assert_eq!(json_of(&back), json_of(&e2));
    let lap = qmf(&["apply", "--op", "laplacian", "--a", "1", "--b", "1", "--c", "0", tf.to_str().unwrap()]);
    assert_eq!(lap.status.code(), Some(0));
}

#[test]
fn usage_errors() {
    let bad = tmp("bad.json", b"{not json");
    assert_eq!(qmf(&["verify-transform", bad.to_str().unwrap()]).status.code(), Some(2));
    let e4 = qmf(&["forms", "emit", "--name", "E4"]);
    let f = tmp("e4b.json", &e4.stdout);
    assert_eq!(qmf(&["verify-transform", f.to_str().unwrap(), "--gamma", "1,1,1,1"]).status.code(), Some(2));
    assert_eq!(qmf(&["verify-transform", f.to_str().unwrap(), "--tau", "1-2i"]).status.code(), Some(2));
    assert_eq!(qmf(&["eigenpoly", "--a", "1", "--b", "2", "--c", "0", "--k", "3", "--d", "1"]).status.code(), Some(2));
    assert_eq!(qmf(&["forms", "emit", "--name", "E8"]).status.code(), Some(2));
    assert_eq!(qmf(&["bogus"]).status.code(), Some(2));
    assert_eq!(qmf(&["verify-transform", "/nonexistent/x.json"]).status.code(), Some(2));
}
