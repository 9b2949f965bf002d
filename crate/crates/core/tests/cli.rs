use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hazard-means"))
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn eval_writes_csv_with_divergent_cells() {
    let model = data("weibull_exp_weight.json");
    let out = run(&["eval", "--model", model.to_str().unwrap(), "--grid", "0.5,1,2"]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    let headers: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(headers, ["x", "h", "h_w", "survival_w", "afr_w", "gfr_w", "hfr_w", "status"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 3);
    let survival: f64 = rows[1][3].parse().unwrap();
    assert!((survival - 0.589499012).abs() < 1e-9);
    assert_eq!(&rows[1][6], "div");
}

#[test]
fn eval_json_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eval.json");
    let model = data("exponential.json");
    let out = run(&["eval", "--model", model.to_str().unwrap(), "--grid", "0.5:2:4", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert!(doc.to_string().contains("afr_w"));
}

#[test]
fn classify_reports_decreasing_classes() {
    let model = data("weibull_dfr.json");
    let out = run(&["classify", "--model", model.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let labels = json(&out)["report"]["labels"].clone();
    assert_eq!(labels, serde_json::json!(["DFR", "Dw-AFR", "Dw-GFR", "Dw-HFR"]));
}

#[test]
fn verify_all_suites_pass() {
    let model = data("weibull_exp_weight.json");
    let out = run(&["verify", "--model", model.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn quantile_table_includes_phm_columns() {
    let model = data("pareto_one.json");
    let out = run(&["quantile", "--model", model.to_str().unwrap(), "--theta", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let header = text.lines().next().unwrap();
    assert_eq!(header, "u,Q,q,h_q,QA,QG,QH,QA_Y,theta_QA_X");
    assert_eq!(text.lines().count(), 100);
}

#[test]
fn system_from_mixture_file() {
    let model = data("exponential_mixture.json");
    let out = run(&["system", "--model", model.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["passed"], serde_json::json!(true));
    assert_eq!(doc["max_weight_sum_gap"], serde_json::json!(0.0));
}

#[test]
fn counterexample_finds_witness() {
    let out = run(&["counterexample", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["outcome"], serde_json::json!("found"));
}

#[test]
fn usage_errors_exit_two_with_json() {
    let out = run(&["eval", "--model", "/nonexistent/model.json"]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["error"]["message"].as_str().unwrap().contains("nonexistent"));

    let out = run(&["classify", "--model", data("exponential.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
