use std::io::Write;
use std::process::{Command, Output, Stdio};

fn synergist(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_synergist"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn");
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    }
    drop(child.stdin.take());
    child.wait_with_output().expect("wait")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn xor_pmf() -> String {
    let out = synergist(&["gen", "--fixture", "xor"], None);
    assert!(out.status.success());
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn measure_reads_stdin() {
    let out = synergist(&["measure", "--mi", "0:2", "--mi", "0,1:2", "--entropy", "0,1"], Some(&xor_pmf()));
    let v = stdout_json(&out);
    assert!(v["I(0:2)"].as_f64().unwrap().abs() < 1e-12);
    assert!((v["I(0,1:2)"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["H(0,1)"].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn measure_csv() {
    let out = synergist(&["--format", "csv", "measure", "--cmi", "0:1|2"], Some(&xor_pmf()));
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("quantity,bits\n"));
    assert!(text.contains("\"I(0:1|2)\",1.0"));
}

#[test]
fn gen_then_synergy_on_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pmf.json");
    let out = synergist(&["--seed", "3", "--out", path.to_str().unwrap(), "gen", "--vars", "2", "--states", "2"], None);
    assert!(out.status.success());
    let out = synergist(&["--seed", "3", "synergy", "--pmf", path.to_str().unwrap(), "--target", "append-redundant"], None);
    let v = stdout_json(&out);
    let mid = v["estimate"]["mid"].as_f64().unwrap();
    let total = v["mutual_information"].as_f64().unwrap();
    assert!(mid >= -1e-9 && mid <= total + 0.05, "{v}");
    assert_eq!(v["target"], serde_json::json!([2]));
}

#[test]
fn find_srv_on_xor_inputs() {
    let out = synergist(&["find-srv", "--inputs", "0,1"], Some(&xor_pmf()));
    let v = stdout_json(&out);
    assert!((v["upper_bound"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn decompose_fixture_converges() {
    let v = stdout_json(&synergist(&["decompose"], None));
    assert_eq!(v["converged"], true, "{v}");
}

#[test]
fn fig2_csv_header() {
    let out = synergist(&["--format", "csv", "fig2", "--trials", "10", "--states", "2"], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("states,trials,success_rate,err_q25,err_median,err_q75"));
    assert!(lines.next().unwrap().starts_with("2,10,"));
}

#[test]
fn fig4_csv_header() {
    let out = synergist(&["--format", "csv", "fig4", "--trials", "10", "--states", "2"], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("arm,perturbation,trials,q25,median,q75,chi_square,p_value"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn oracle_census_json() {
    let v = stdout_json(&synergist(&["oracle-census"], None));
    assert_eq!(v["pairwise_xors_found"], true);
    assert!((v["synergy_about_self"].as_f64().unwrap() - 3.0).abs() < 1e-12);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(synergist(&["bogus"], None).status.code(), Some(2));
    assert_eq!(synergist(&["measure", "--mi", "0-1"], Some(&xor_pmf())).status.code(), Some(2));
    assert_eq!(synergist(&["measure"], Some(&xor_pmf())).status.code(), Some(2));
}

#[test]
fn domain_errors_exit_one() {
    assert_eq!(synergist(&["measure", "--entropy", "7"], Some(&xor_pmf())).status.code(), Some(1));
    let bad = r#"{"cardinalities":[2,2],"probs":[0.5,0.5,0.5,0.5]}"#;
    assert_eq!(synergist(&["measure", "--entropy", "0"], Some(bad)).status.code(), Some(1));
}
