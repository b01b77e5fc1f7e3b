use std::path::Path;
use std::process::{Command, Output};

fn equimax(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_equimax"))
        .args(args)
        .env_remove("EQUIMAX_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn write_values(path: &Path, values: &[f64]) {
    let body: String = values.iter().map(|v| format!("{v}\n")).collect();
    std::fs::write(path, format!("value\n{body}")).unwrap();
}

#[test]
fn identities_sweep_passes() {
    let out = equimax(&[
        "identities", "--ruiz-nmax", "12", "--lemma2-mmax", "20", "--lemma2-kmax", "12", "--theorem-nmax", "12",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["passed"], true);
    for key in ["ruiz", "power_sum", "key_identity", "induction_step"] {
        assert_eq!(report["result"][key]["discrepancies"].as_array().unwrap().len(), 0, "{key}");
    }
    assert_eq!(report["config"]["parameters"]["lemma2-mmax"], 20);
    assert!(out.stdout.ends_with(b"\n"));
}

#[test]
fn series_check_reports_no_mismatch_per_n() {
    let out = equimax(&["series-check", "--lambda", "1", "--n", "2..8", "--order", "16"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    let eq8 = report["result"]["eq8"].as_array().unwrap();
    assert_eq!(eq8.len(), 7);
    for entry in eq8 {
        assert_eq!(entry["status"], "no mismatch");
        assert_eq!(entry["outside_titular_scope"], entry["n"] == 2);
    }
}

#[test]
fn gof_test_rejects_short_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("data.csv");
    std::fs::write(&path, "1\n2\n3\n4\n5\n").unwrap();
    let out = equimax(&[
        "gof-test", "--input", path.to_str().unwrap(), "--n", "3", "--B", "500", "--alpha", "0.05", "--seed", "42",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("need at least 6 values"), "{stderr}");
}

#[test]
fn gof_test_reports_line_of_bad_entry() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "value\n1.0\n2.0\n-4\n").unwrap();
    let out = equimax(&["gof-test", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":4:"));
}

#[test]
fn gof_test_report_fields_and_seed_echo() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("data.csv");
    let values = equimax::DensityModel::exponential(2.0).unwrap().sample(600, 3).unwrap();
    write_values(&path, &values);
    let out = equimax(&["gof-test", "--input", path.to_str().unwrap(), "--n", "3", "--B", "100", "--seed", "42"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["config"]["seed"], 42);
    let test = report["result"]["test"].as_object().unwrap();
    let keys: Vec<&str> = test.keys().map(String::as_str).collect();
    let mut expected = vec!["n", "m1", "m2", "ks_statistic", "p_value", "alpha", "reject", "B", "seed", "engine_version"];
    expected.sort_unstable();
    let mut sorted = keys.clone();
    sorted.sort_unstable();
    assert_eq!(sorted, expected);
    assert_eq!(test["seed"], 42);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.find("\"ks_statistic\"").unwrap() < text.rfind("\"engine_version\"").unwrap());
}

#[test]
fn rejection_still_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("uniform.csv");
    let values = equimax::DensityModel::uniform(1.0).unwrap().sample(3000, 1).unwrap();
    write_values(&path, &values);
    let out = equimax(&["gof-test", "--input", path.to_str().unwrap(), "--n", "3", "--B", "200"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["test"]["reject"], true);
}

#[test]
fn seed_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_equimax"))
        .args(["simulate", "--N", "60", "--reps", "2", "--B", "10"])
        .env("EQUIMAX_SEED", "77")
        .output()
        .unwrap();
    assert_eq!(json(&out)["config"]["seed"], 77);
    let flag = Command::new(env!("CARGO_BIN_EXE_equimax"))
        .args(["simulate", "--N", "60", "--reps", "2", "--B", "10", "--seed", "5"])
        .env("EQUIMAX_SEED", "77")
        .output()
        .unwrap();
    assert_eq!(json(&flag)["config"]["seed"], 5);
}

#[test]
fn quad_check_csv_and_exit_codes() {
    let out = equimax(&["quad-check", "--model", "exp:rate=1", "--n", "4", "--x-max", "10", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("x,lhs_cdf,rhs_cdf,discrepancy"));
    assert_eq!(text.lines().count(), 65);

    let out = equimax(&["quad-check", "--model", "uniform:theta=1", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["identity_fails"], true);

    let out = equimax(&["quad-check", "--model", "beta:a=1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = equimax(&["quad-check", "--grid", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_file_and_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = equimax(&["identities", "--ruiz-nmax", "3", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(report["config"]["output_path"], path.to_str().unwrap());

    assert_eq!(equimax(&["identities", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(equimax(&["simulate", "--format", "csv"]).status.code(), Some(2));
    assert_eq!(equimax(&["series-check", "--n", "1..3"]).status.code(), Some(2));
}
