use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

fn scratch(name: &str) -> PathBuf {
    Path::new(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperscheme")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

/// Runs with `--json`, checks the exit code and returns the parsed report.
fn report(args: &[&str], expected_code: i32) -> Value {
    let mut full = args.to_vec();
    full.push("--json");
    let out = run(&full);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(code(&out), expected_code, "{args:?}\nstderr: {stderr}");
    let r: Value = serde_json::from_slice(&out.stdout).expect("stdout is JSON");
    let status = if expected_code == 0 { "pass" } else { "fail" };
    assert_eq!(r["status"], status);
    assert!(r["command"].is_array());
    r
}

#[test]
fn verify_association_scheme() {
    let r = report(&["verify", &fixture("k3.json")], 0);
    assert_eq!(r["results"]["kind"], "association");
    assert_eq!(r["results"]["valencies"], serde_json::json!([1, 2]));
    assert_eq!(r["results"]["n_points"], 3);
}

#[test]
fn verify_reports_counting_witness() {
    let r = report(&["verify", &fixture("broken.json")], 1);
    let v = &r["results"]["violation"];
    assert!(v["axiom"].as_str().unwrap().contains("counting"), "{v}");
    assert!(!v["witness"].is_null());
}

#[test]
fn verify_reports_generalized_axiom() {
    let r = report(&["verify", &fixture("k3_perturbed.json")], 1);
    assert_eq!(r["results"]["kind"], "generalized");
    assert_eq!(r["results"]["axiom_number"], 5);
}

#[test]
fn human_output_by_default() {
    let out = run(&["verify", &fixture("k3.json")]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("status: pass"));
    assert!(text.contains("valencies: [1,2]"));
}

#[test]
fn usage_and_input_errors_exit_2() {
    assert_eq!(code(&run(&[])), 2);
    assert_eq!(code(&run(&["verify"])), 2);
    assert_eq!(code(&run(&["dtgraph", "--a", "3"])), 2);
    assert_eq!(code(&run(&["verify", "/nonexistent/file.json"])), 2);
    assert_eq!(code(&run(&["verify", &fixture("s3.json")])), 2);
}

#[test]
fn cosets_of_s3_give_k3() {
    let out = scratch("cosets_k3.json");
    let r = report(&["cosets", &fixture("s3.json"), "0,1", "-o", out.to_str().unwrap()], 0);
    assert_eq!(r["results"]["valencies"], serde_json::json!([1, 2]));
    let v = report(&["verify", out.to_str().unwrap()], 0);
    assert_eq!(v["results"]["n_points"], 3);
}

#[test]
fn cosets_rejects_non_subgroup() {
    report(&["cosets", &fixture("s3.json"), "0,1,2"], 1);
}

#[test]
fn characters_of_k3_are_exact() {
    let r = report(&["characters", &fixture("k3.json")], 0);
    assert_eq!(r["results"]["exact"]["chars"], serde_json::json!([[1, 1], [1, "-1/2"]]));
    assert_eq!(r["results"]["exact"]["plancherel"], serde_json::json!(["1/3", "2/3"]));
}

#[test]
fn dual_convolution_is_nonnegative() {
    let r = report(&["dual", &fixture("k3_hypergroup.json"), "1", "1"], 0);
    assert_eq!(r["results"]["nonnegative"], true);
    assert_eq!(r["results"]["exact"], serde_json::json!(["1/2", "1/2"]));
}

#[test]
fn deform_checks_semicharacter() {
    report(&["deform", &fixture("k3_hypergroup.json"), "--alpha", "1,-1/2"], 1);
    let out = scratch("deformed.json");
    report(&["deform", &fixture("k3_hypergroup.json"), "--alpha", "1,1", "-o", out.to_str().unwrap()], 0);
    report(&["characters", out.to_str().unwrap()], 0);
}

#[test]
fn dtgraph_psd_fails_above_threshold() {
    let r = report(&["dtgraph", "--a", "3", "--b", "2", "--report", "psd", "--x", "1.3", "--radius", "6"], 1);
    assert!(r["results"]["min_eig"][0].as_f64().unwrap() < 0.0);
    report(&["dtgraph", "--a", "3", "--b", "2", "--report", "psd"], 0);
}

#[test]
fn dtgraph_reports_pass() {
    for rep in ["summary", "ortho", "deform", "pushforward"] {
        let r = report(&["dtgraph", "--a", "3", "--b", "2", "--report", rep, "--deform-c", "0.3"], 0);
        assert_eq!(r["results"]["params"]["a"], 3, "{rep}");
    }
}

#[test]
fn product_and_join_of_schemes_verify() {
    let k3 = fixture("k3.json");
    let out = scratch("product.json");
    let r = report(&["product", &k3, &k3, "-o", out.to_str().unwrap()], 0);
    assert_eq!(r["results"]["construction"]["kind"], "product");
    let v = report(&["verify", out.to_str().unwrap()], 0);
    assert_eq!(v["results"]["valencies"], serde_json::json!([1, 2, 2, 4]));

    let r = report(&["join", &k3, &k3], 0);
    assert_eq!(r["results"]["construction"]["scale"], 3);
    assert_eq!(r["results"]["t1"], true);
    assert_eq!(r["results"]["t2"], true);
}

#[test]
fn join_of_hypergroups_has_expected_haar() {
    let h = fixture("k3_hypergroup.json");
    let r = report(&["join", &h, &h], 0);
    assert_eq!(r["results"]["haar"], serde_json::json!([1, 2, 6]));
}

#[test]
fn walk_matches_convolution_power() {
    let r = report(&["walk", &fixture("k3.json"), "--mu", "0,1", "--steps", "3", "--trials", "20000", "--exact"], 0);
    assert_eq!(r["results"]["convolution_power"], serde_json::json!([0.25, 0.75]));
    assert!(r["results"]["tv"].as_f64().unwrap() < 0.02);
    assert!(r["results"]["propagation_residual"].as_f64().unwrap() < 1e-10);
}

#[test]
fn walk_on_ball_with_deformation() {
    let r =
        report(&["walk", "--dtgraph", "3,2,8,0.3", "--mu", "0,1", "--steps", "6", "--trials", "20000", "--exact"], 0);
    assert!(r["results"]["tv"].as_f64().unwrap() < 0.02);
}

#[test]
fn walk_is_reproducible_from_seed() {
    let args = ["walk", &fixture("k3.json"), "--mu", "1/2,1/2", "--steps", "4", "--trials", "5000", "--seed", "7"];
    let a = report(&args, 0);
    let b = report(&args, 0);
    assert_eq!(a["results"]["empirical"], b["results"]["empirical"]);
    assert_eq!(a["seed"], 7);
}

#[test]
fn walk_leaving_ball_is_an_input_error() {
    assert_eq!(code(&run(&["walk", "--dtgraph", "3,2,3", "--mu", "0,1", "--steps", "6"])), 2);
}
