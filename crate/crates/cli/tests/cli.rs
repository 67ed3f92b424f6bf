use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subshift")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = run(&all);
    let value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("invalid JSON ({e}): {}", stdout(&out));
    });
    (value, out.status.code().unwrap())
}

#[test]
fn analyze_worked_example_json() {
    let (v, code) = json(&["analyze", &data("aba-baab.sub")]);
    assert_eq!(code, 0);
    assert_eq!(v["g"], "2");
    assert_eq!(v["r"], 2);
    assert_eq!(v["F_finite"], false);
    assert_eq!(v["Fstar_finite"], true);
    assert_eq!(v["q"]["display"], "X^3 - 4X^2 + 2X");
    assert_eq!(v["q"]["coefficients"], serde_json::json!(["0", "2", "-4", "1"]));
    assert_eq!(v["matrix"], serde_json::json!([["1", "1", "0"], ["2", "2", "1"], ["1", "1", "1"]]));
    assert_eq!(v["path"]["kind"], "properized");
    assert_eq!(v["periodicity"]["status"], "aperiodic_evidence");
    assert_eq!(v["periodicity"]["certified"], false);
    assert_eq!(v["odometer_primes"], serde_json::json!(["2"]));
}

#[test]
fn analyze_constant_length_json() {
    let (v, code) = json(&["analyze", &data("thue-morse.sub")]);
    assert_eq!(code, 0);
    assert_eq!(v["path"]["kind"], "constant_length");
    assert_eq!(v["constant_length"]["odometer_base"], serde_json::json!(["1", "2"]));
    assert_eq!(v["candidate_primes"], Value::Null);
}

#[test]
fn periodic_input_is_reported() {
    let (v, code) = json(&["analyze", &data("periodic.sub")]);
    assert_eq!(code, 0);
    assert_eq!(v["valid"], false);
    assert_eq!(v["periodicity"]["status"], "periodic");
    assert_eq!(v["periodicity"]["period"], "ab");
}

#[test]
fn batch_runs_every_file() {
    let files = [data("fibonacci.sub"), data("aba-baab.sub"), data("thue-morse.sub")];
    let mut args = vec!["analyze"];
    args.extend(files.iter().map(String::as_str));
    let (v, code) = json(&args);
    assert_eq!(code, 0);
    let reports = v.as_array().unwrap();
    assert_eq!(reports.len(), 3);
    let gs: Vec<&str> = reports.iter().map(|r| r["g"].as_str().unwrap()).collect();
    assert_eq!(gs, ["1", "2", "2"]);

    let (v, code) = json(&["analyze", &data("fibonacci.sub"), &data("reducible.sub")]);
    assert_eq!(code, 1);
    assert_eq!(v[1]["kind"], "analysis");

    let (v, code) = json(&["analyze", &data("fibonacci.sub"), &data("empty-image.sub")]);
    assert_eq!(code, 2);
    assert_eq!(v[0]["g"], "1");
    assert_eq!(v[1]["kind"], "parse");
}

#[test]
fn exit_codes() {
    let out = run(&["analyze", &data("empty-image.sub")]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 1, column 5"), "{err}");
    assert!(err.contains("empty image"), "{err}");

    assert_eq!(run(&["analyze", &data("reducible.sub")]).status.code(), Some(1));
    assert_eq!(run(&["analyze", &data("missing.sub")]).status.code(), Some(2));
    assert_eq!(run(&["analyze"]).status.code(), Some(2));
    assert_eq!(run(&["bound", "0"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn properize_prints_tables_and_emits_zeta() {
    let out = run(&["properize", &data("aba-baab.sub")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("B: (1,1) (1,2) (2,1)"), "{text}");
    assert!(text.contains("(1,2) -> (1,1) (1,2) (2,1) (1,1) (1,2)"), "{text}");
    assert!(text.contains("2 -> (2,1)"), "{text}");

    let target = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("zeta.sub");
    let target = target.display().to_string();
    assert_eq!(run(&["properize", &data("aba-baab.sub"), "--emit", &target]).status.code(), Some(0));
    let (v, code) = json(&["analyze", &target]);
    assert_eq!(code, 0);
    assert_eq!(v["path"]["kind"], "proper");
    assert_eq!(v["g"], "2");
    assert_eq!(v["alphabet"], serde_json::json!(["(1,1)", "(1,2)", "(2,1)"]));
}

#[test]
fn derived_and_return_words() {
    let (v, _) = json(&["derived", &data("aba-baab.sub")]);
    assert_eq!(v["return_words"], serde_json::json!(["ab", "a"]));
    assert_eq!(v["tau"][0]["image"], serde_json::json!(["1", "1", "2", "1"]));
    assert_eq!(v["certified"], true);

    let (v, _) = json(&["return-words", &data("fibonacci.sub"), "aba", "--prefix-len", "2000"]);
    assert_eq!(v["return_words"], serde_json::json!(["aba", "ab"]));
    assert_eq!(v["certified"], false);
}

#[test]
fn spectrum_search() {
    let (v, code) = json(&["spectrum", &data("aba-baab.sub"), "2", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["p_divides_g"], true);
    assert_eq!(v["searches"][0]["witness"], 3);
    let (v, _) = json(&["spectrum", &data("aba-baab.sub"), "3", "1"]);
    assert_eq!(v["searches"][0]["witness"], Value::Null);
    assert_eq!(run(&["spectrum", &data("fibonacci.sub"), "4", "1"]).status.code(), Some(1));
}

#[test]
fn sturmian_golden_check() {
    let cf = "0,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1";
    let out = run(&["sturmian", "--cf", cf, "--len", "100", "--check"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let prefix = text.lines().next().unwrap();
    assert_eq!(prefix.len(), 100);
    assert!(prefix.chars().all(|c| c == '0' || c == '1'));
    assert!(text.contains("rotation oracle, factor sets for n ≤ 12: pass"), "{text}");

    let (v, code) = json(&["sturmian", "--cf", "0,1,1,1", "--len", "1000"]);
    assert_eq!(code, 1);
    assert_eq!(v["kind"], "analysis");
    assert!(v["error"].as_str().unwrap().contains("need 1000"));
}

#[test]
fn lr_estimate_sources() {
    let (v, code) = json(&["lr-estimate", &data("fibonacci.sub"), "--max-anchor", "20", "--k", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["ratio"], "3");
    assert_eq!(v["certified"], false);
    assert_eq!(v["diagnostics"]["passed"], true);

    let (v, _) = json(&["lr-estimate", "--cf", "0,2,2,2,2,2,2,2,2,2,2,2,2,2", "--prefix-len", "3000"]);
    assert_eq!(v["periodicity"]["status"], "not_probed");
    assert!(v["ratio_value"].as_f64().unwrap() >= 1.0);

    let (v, _) = json(&["lr-estimate", &data("golden.dir"), "--prefix-len", "2000", "--s0", "2"]);
    assert_eq!(v["window"]["passed"], true);

    let (v, _) = json(&["lr-estimate", &data("fibonacci.sub"), "--max-anchor", "10", "--k", "1"]);
    assert_eq!(v["diagnostics"]["power_free"]["witness"], "aa");
}

#[test]
fn sadic_decompose_and_bound() {
    let (v, code) = json(&["sadic-decompose", &data("fibonacci.sub"), "--k", "2", "--depth", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["alpha"], 12);
    assert_eq!(v["levels"].as_array().unwrap().len(), 3);
    assert_eq!(v["certified"], false);
    let reconstruction = v["reconstruction"].as_str().unwrap();
    assert!(reconstruction.starts_with("abaababaabaab"));

    let (v, _) = json(&["bound", "1"]);
    assert_eq!(v["bound"], "121439531096594251776");
}
