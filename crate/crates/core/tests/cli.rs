use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn racah_kit(args: &[&str], backend_env: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_racah-kit"));
    cmd.args(args).env_remove("RACAH_KIT_BACKEND");
    if let Some(b) = backend_env {
        cmd.env("RACAH_KIT_BACKEND", b);
    }
    cmd.output().expect("run binary")
}

fn json_of(args: &[&str]) -> Value {
    let out = racah_kit(args, None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn coupling_suite_residuals_are_zero() {
    let doc = json_of(&["verify", "--suite", "coupling", "--nu", "1,1,1", "--N", "1", "--backend", "exact"]);
    assert_eq!(doc["passed"], json!(true));
    for r in doc["residuals"].as_array().unwrap() {
        assert_eq!(r["exact"], json!("0"), "{r}");
    }
}

#[test]
fn symmetry_suite_exact() {
    let out = racah_kit(&["verify", "--suite", "symmetry", "--k", "1,1,1", "--N", "2", "--backend", "exact"], None);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn injected_failure_exits_one() {
    for suite in [
        &["verify", "--suite", "symmetry", "--k", "1,1,1", "--N", "2", "--perturb", "1/100"][..],
        &["verify", "--suite", "algebra", "--nu", "1,1,1", "--N", "2", "--perturb", "1/100"][..],
        &["verify", "--suite", "algebra", "--racah", "1/2,3/4,-4,2/3", "--N", "3", "--perturb", "1/100"][..],
    ] {
        let out = racah_kit(suite, None);
        assert_eq!(out.status.code(), Some(1), "{suite:?}");
        let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(doc["passed"], json!(false));
    }
}

#[test]
fn config_errors_exit_two() {
    for args in [
        &["verify", "--suite", "coupling", "--nu", "1.5x,1,1", "--N", "1"][..],
        &["verify", "--suite", "coupling", "--nu", "1,1", "--N", "1"][..],
        &["verify", "--suite", "coupling", "--nu", "0,1,1", "--N", "1"][..],
        &["verify", "--suite", "coupling", "--nu", "1,1,1"][..],
        &["verify", "--suite", "bogus", "--N", "1"][..],
        &["spectrum", "--k", "1,1,1", "--N", "1", "--format", "xml"][..],
        &["poly", "--racah", "1,1,1,1", "--N", "2"][..],
        &["frobnicate"][..],
    ] {
        assert_eq!(racah_kit(args, None).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn pochhammer_pole_exits_one_with_location() {
    let out = racah_kit(&["poly", "--racah", "-2,1/2,-4,1/3", "--N", "3"], None);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("k = 2") && err.contains("(n, x)"), "{err}");
}

#[test]
fn spectrum_values() {
    let doc = json_of(&["spectrum", "--k", "1,1,1", "--N", "1", "--backend", "float"]);
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows[0]["energy"], json!(24.75));
    assert_eq!(rows[1]["energy"], json!(48.75));
    assert_eq!(rows[0]["degeneracy"], json!(1));
    assert_eq!(rows[1]["degeneracy"], json!(2));

    let doc = json_of(&["spectrum", "--k", "1,1,1", "--N", "1"]);
    let energies: Vec<&Value> = doc["rows"].as_array().unwrap().iter().map(|r| &r["energy"]).collect();
    assert_eq!(energies, [&json!("99/4"), &json!("195/4")]);
}

#[test]
fn trivial_table() {
    let doc = json_of(&["racah-table", "--nu", "1,1,1", "--N", "0", "--backend", "float"]);
    assert_eq!(doc["coeffs"], json!([[1.0]]));
}

#[test]
fn table_for_n_one_is_orthogonal() {
    let doc = json_of(&["racah-table", "--nu", "1,1,1", "--N", "1", "--backend", "float"]);
    let t: Vec<Vec<f64>> = serde_json::from_value(doc["coeffs"].clone()).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            let dot: f64 = (0..2).map(|k| t[i][k] * t[j][k]).sum();
            assert!((dot - if i == j { 1.0 } else { 0.0 }).abs() <= 1e-12);
        }
    }
}

#[test]
fn table_for_other_pairs() {
    let doc = json_of(&["racah-table", "--nu", "1,1,1", "--N", "1", "--pairs", "31,23"]);
    assert_eq!(doc["pairs"], json!(["23", "31"]));
    assert_eq!(racah_kit(&["racah-table", "--nu", "1,1,1", "--N", "1", "--pairs", "12,12"], None).status.code(), Some(2));
}

#[test]
fn poly_grid() {
    let doc = json_of(&["poly", "--racah", "1/2,3/4,-4,2/3", "--N", "3"]);
    assert_eq!(doc["max_discrepancy"], json!("0"));
    let grid = doc["hypergeometric"].as_array().unwrap();
    for (n, row) in grid.iter().enumerate() {
        for (x, v) in row.as_array().unwrap().iter().enumerate() {
            if n == 0 || x == 0 {
                assert_eq!(v, &json!("1"));
            }
        }
    }
    assert_eq!(doc["hypergeometric"], doc["recurrence"]);
    assert_eq!(doc["hypergeometric"], doc["difference"]);
}

#[test]
fn backend_precedence() {
    let args = ["spectrum", "--k", "1,1,1", "--N", "0"];
    let float: Value = serde_json::from_slice(&racah_kit(&args, Some("float")).stdout).unwrap();
    assert_eq!(float["backend"], json!("float"));
    let mut with_flag = args.to_vec();
    with_flag.extend(["--backend", "exact"]);
    let exact: Value = serde_json::from_slice(&racah_kit(&with_flag, Some("float")).stdout).unwrap();
    assert_eq!(exact["backend"], json!("exact"));
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("job.cfg");
    std::fs::write(&cfg, "# spectrum job\nk = 1,1,1\nN = 2\nbackend = float\nformat = csv\n").unwrap();
    let out = racah_kit(&["spectrum", "--config", cfg.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("N,energy,degeneracy"));
    assert_eq!(text.lines().count(), 4);
    assert!(text.contains("24.75"));

    let out = racah_kit(&["spectrum", "--config", cfg.to_str().unwrap(), "--N", "0", "--format", "json"], None);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["N_max"], json!(0));
}

#[test]
fn output_file_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.csv");
    let out = racah_kit(
        &["racah-table", "--nu", "1,1,1", "--N", "1", "--format", "csv", "--output", path.to_str().unwrap()],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["nu23\\nu12", "2", "3"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(&rows[0][0], "2");
}

#[test]
fn unwritable_output_is_a_config_error() {
    let out = racah_kit(
        &["spectrum", "--k", "1,1,1", "--N", "0", "--output", Path::new("/nonexistent/dir/out.json").to_str().unwrap()],
        None,
    );
    assert_eq!(out.status.code(), Some(2));
}
