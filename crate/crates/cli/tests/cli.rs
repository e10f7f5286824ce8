use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use torus_hypo::Field as FourierField;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_torus-hypo"));
    cmd.env_remove("TORUS_HYPO_THREADS");
    cmd
}

fn exec(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("torus-hypo-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    dir.join(name)
}

#[test]
fn classify_exit_codes_follow_the_verdict() {
    for (file, mode, expect) in [
        ("liouville_pair.json", "gevrey", 0),
        ("liouville_pair.json", "smooth", 10),
        ("opaque_s2.json", "gevrey", 20),
        ("definite_tube.json", "gevrey", 0),
        ("all_change_sign.json", "gevrey", 10),
    ] {
        let out = exec(&["classify", &fixture(file), "--mode", mode]);
        assert_eq!(code(&out), expect, "{file} {mode}");
        assert_eq!(report(&out)["result"]["exit_code"], expect);
    }
}

#[test]
fn reports_are_byte_identical_across_runs_and_thread_counts() {
    let args = ["singular", &fixture("rational_j.json"), "--xi-max", "256"];
    let first = exec(&args);
    assert_eq!(code(&first), 0);
    let second = exec(&args);
    let capped = bin().args(args).env("TORUS_HYPO_THREADS", "1").output().unwrap();
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(first.stdout, capped.stdout);
}

#[test]
fn timing_is_opt_in() {
    let plain = report(&exec(&["cf", "convergents", "constant:1", "--n", "5"]));
    assert!(plain.get("runtime").is_none());
    let timed = report(&exec(&["--timing", "cf", "convergents", "constant:1", "--n", "5"]));
    assert!(timed["runtime"].is_object());
}

#[test]
fn invalid_thread_cap_is_malformed() {
    let out = bin().args(["cf", "convergents", "constant:1"]).env("TORUS_HYPO_THREADS", "zero").output().unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&exec(&["classify"])), 2);
    assert_eq!(code(&exec(&["cf", "convergents", "explicit:1,x"])), 2);
}

#[test]
fn missing_file_is_io() {
    let out = exec(&["classify", "/nonexistent/spec.json"]);
    assert_eq!(code(&out), 1);
    assert_eq!(report(&out)["result"]["error"]["kind"], "Io");
}

#[test]
fn golden_ratio_convergents_are_fibonacci() {
    let r = report(&exec(&["cf", "convergents", "constant:1", "--n", "8"]));
    let q: Vec<String> = r["result"]["convergents"].as_array().unwrap().iter().map(|row| row["q"].as_str().unwrap().to_string()).collect();
    assert_eq!(q, ["1", "2", "3", "5", "8", "13", "21", "34"]);
}

#[test]
fn condition_b_flags_the_first_factorial_row() {
    let out = exec(&["cf", "condition-b", "factorial_pow10"]);
    let r = report(&out);
    assert_eq!(r["result"]["all_certified"], false);
    let rows = r["result"]["rows"].as_array().unwrap();
    assert_eq!(rows[0]["n"], 3);
    assert_eq!(rows[0]["certified"], false);
    assert!(rows[1..].iter().all(|row| row["certified"] == true));
}

#[test]
fn manufactured_solve_recovers_the_solution() {
    let out_path = tmp("manufactured_v.json");
    let out = exec(&[
        "solve",
        &fixture("hypo_tube.json"),
        &fixture("manufactured_rhs.json"),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(report(&out)["result"]["max_residual"].as_f64().unwrap() < 1e-10);
    let v: FourierField = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    let u: FourierField = serde_json::from_str(&std::fs::read_to_string(fixture("manufactured_u.json")).unwrap()).unwrap();
    assert!(v.sub(&u).unwrap().max_abs() < 1e-10);
}

#[test]
fn solve_rejects_bad_right_hand_sides() {
    let spec = fixture("hypo_tube.json");
    assert_eq!(code(&exec(&["solve", &spec, &fixture("nonzero_mean_rhs.json")])), 30);
    assert_eq!(code(&exec(&["solve", &fixture("definite_tube.json"), &fixture("zero_rhs.json")])), 2);
    let zero = report(&exec(&["solve", &spec, &fixture("zero_rhs.json")]));
    assert_eq!(zero["result"]["exit_code"], 0);
}

#[test]
fn solve_without_solver_is_a_profile_error() {
    let rhs = tmp("two_zero.json");
    let zero = FourierField::zero(2, 16);
    let doc = serde_json::json!({ "f": [&zero, &zero] });
    std::fs::write(&rhs, doc.to_string()).unwrap();
    let out = exec(&["solve", &fixture("all_change_sign.json"), rhs.to_str().unwrap()]);
    assert_eq!(code(&out), 31);
    assert_eq!(report(&out)["result"]["error"]["kind"], "ProfileError");
}

#[test]
fn singular_refuses_hypoelliptic_and_undecided_systems() {
    let refused = exec(&["singular", &fixture("definite_tube.json")]);
    assert_eq!(code(&refused), 40);
    assert_eq!(report(&refused)["result"]["error"]["kind"], "RefusedHypoelliptic");
    assert_eq!(code(&exec(&["singular", &fixture("opaque_s2.json")])), 41);
}

#[test]
fn singular_writes_certificate_and_coefficients() {
    let out_path = tmp("singular.json");
    let out = exec(&["singular", &fixture("all_change_sign.json"), "--xi-max", "256", "--out", out_path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert!(doc["certificate"]["construction"].as_array().unwrap().contains(&Value::from("Product")));
    let coeffs: FourierField = serde_json::from_value(doc["coefficients"].clone()).unwrap();
    assert_eq!(coeffs.n(), 2);
}

#[test]
fn normalform_and_diagnose_run() {
    let nf = report(&exec(&["normalform", &fixture("hypo_tube.json")]));
    assert_eq!(nf["result"]["trivial"], false);
    let out = exec(&["diagnose", &fixture("liouville_pair.json")]);
    assert_eq!(code(&out), 0);
    assert!(report(&out)["result"]["decisions"].is_object());
}
