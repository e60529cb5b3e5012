use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bidiag-traces"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn data_rows(text: &str) -> Vec<&str> {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .collect()
}

#[test]
fn trace_prints_one_row_per_order() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.txt", "2\n1 1\n1\n");
    let out = stdout(&run(&[
        "trace",
        "--input",
        &m,
        "--method",
        "new",
        "--max-order",
        "2",
    ]));
    assert_eq!(data_rows(&out), vec!["1, 3", "2, 7"]);
    let oracle = stdout(&run(&[
        "trace",
        "--input",
        &m,
        "--method",
        "oracle",
        "--max-order",
        "2",
    ]));
    assert_eq!(data_rows(&oracle), vec!["1, 3", "2, 7"]);
}

#[test]
fn malformed_file_names_the_length_rule() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "bad.txt", "2\n1 1\n1 1\n");
    let out = run(&["trace", "--input", &m]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3") && err.contains("N - 1"), "{err}");
}

#[test]
fn missing_file_and_bad_values() {
    let out = run(&["trace", "--input", "/nonexistent/m.txt"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not found"));
    let out = run(&["trace", "--inline", "1,-1;1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not strictly positive"));
}

#[test]
fn json_round_trips_every_cell() {
    let text = stdout(&run(&[
        "trace",
        "--inline",
        "0.7,1.3,0.9;1.1,0.6",
        "--method",
        "ykn12",
        "--method",
        "kyn11",
        "--max-order",
        "5",
        "--format",
        "json",
    ]));
    let doc: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["config"]["command"], "trace");
    let results = doc["results"].as_array().unwrap();
    assert_eq!(results.len(), 10);
    let b = bidiag_traces::parse_inline("0.7,1.3,0.9;1.1,0.6").unwrap();
    let expected = bidiag_traces::traces_ykn12(&b, 5).unwrap();
    for (row, want) in results.iter().zip(&expected) {
        assert_eq!(row["J"].as_f64().unwrap(), *want);
    }
    assert!(doc["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn csv_has_header_and_17_digit_cells() {
    let text = stdout(&run(&[
        "trace",
        "--inline",
        "1,1;1",
        "--max-order",
        "3",
        "--format",
        "csv",
    ]));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("table,method,side,M,J,note"));
    assert_eq!(
        lines.next(),
        Some("trace,new,lower,1,3.0000000000000000e0,")
    );
}

#[test]
fn compare_reports_tiny_residuals() {
    let text = stdout(&run(&[
        "compare",
        "--inline",
        "1,1;1",
        "--max-order",
        "3",
        "--format",
        "json",
    ]));
    let doc: Value = serde_json::from_str(&text).unwrap();
    for row in doc["results"].as_array().unwrap() {
        let value = if row["table"] == "values" {
            &row["max_rel_dev"]
        } else {
            &row["value"]
        };
        assert!(value.as_f64().unwrap() <= 1e-10, "{row}");
    }
}

#[test]
fn compare_with_path_sums_at_n8() {
    let out = run(&["gen", "--n", "8", "--seed", "5"]);
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m8.txt", &stdout(&out));
    let text = stdout(&run(&[
        "compare",
        "--input",
        &m,
        "--method",
        "new",
        "--method",
        "oracle",
        "--max-order",
        "5",
        "--budget",
        "100000",
        "--format",
        "json",
    ]));
    let doc: Value = serde_json::from_str(&text).unwrap();
    let residual = |name: &str| {
        doc["results"]
            .as_array()
            .unwrap()
            .iter()
            .find(|r| r["check"] == name)
            .unwrap()["value"]
            .as_f64()
            .unwrap()
    };
    assert!(residual("path_sum_gtilde_dev") <= 1e-10);
    assert!(residual("path_sum_g_dev") <= 1e-10);
}

#[test]
fn compare_path_sums_respect_the_budget() {
    let text = stdout(&run(&[
        "compare",
        "--inline",
        "1,1,1,1,1,1;1,1,1,1,1",
        "--method",
        "new",
        "--method",
        "ykn12",
        "--max-order",
        "6",
        "--budget",
        "10",
    ]));
    assert!(text.contains("path_sum_g_dev, -, skipped"), "{text}");
}

#[test]
fn compare_needs_two_methods() {
    let out = run(&["compare", "--inline", "1,1;1", "--method", "new"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "compare", "--inline", "1,1;1", "--method", "new", "--method", "new",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn overflow_is_reported_in_band() {
    let out = run(&[
        "trace",
        "--inline",
        "1e-3,1e-3;1e-3",
        "--method",
        "ykyy14",
        "--max-order",
        "120",
        "--format",
        "json",
    ]);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = doc["results"].as_array().unwrap();
    assert!(rows[0]["J"].is_f64());
    let last = &rows[119];
    assert!(last["J"].is_null());
    assert!(last["note"].as_str().unwrap().contains("overflow"));
    assert!(!doc["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn cancellation_is_flagged_without_failing() {
    // v_2^(3) is tiny and positive but comes out negative after subtraction
    let out = run(&[
        "trace",
        "--inline",
        "0.003,2.4e8,4.3e5;1.5e-10,3.9e-6",
        "--method",
        "kyn11",
        "--max-order",
        "3",
    ]);
    let text = stdout(&out);
    assert!(text.contains("3, 3.7037e+07, cancellation"), "{text}");
    assert!(
        text.contains("warning: kyn11: cancellation: v_2^(3)"),
        "{text}"
    );
}

#[test]
fn bounds_columns_agree() {
    let text = stdout(&run(&[
        "bounds",
        "--inline",
        "1,1;1",
        "--max-order",
        "2",
        "--format",
        "json",
    ]));
    let doc: Value = serde_json::from_str(&text).unwrap();
    let rows = doc["results"].as_array().unwrap();
    let thetas: Vec<f64> = rows
        .iter()
        .filter(|r| r["table"] == "bounds" && r["M"] == 2)
        .map(|r| r["theta"].as_f64().unwrap())
        .collect();
    assert_eq!(thetas.len(), 5);
    for t in thetas {
        assert!((t / 7f64.powf(-0.25) - 1.0).abs() <= 1e-10);
    }
    let sigma = rows.iter().find(|r| r["quantity"] == "sigma_min").unwrap()["value"]
        .as_f64()
        .unwrap();
    assert!((sigma - ((3.0 - 5f64.sqrt()) / 2.0).sqrt()).abs() <= 1e-12);
}

#[test]
fn diag_and_oracle_commands() {
    let text = stdout(&run(&[
        "diag",
        "--inline",
        "1,1;1",
        "--method",
        "ykn12",
        "--max-order",
        "2",
    ]));
    assert!(data_rows(&text).contains(&"2, 1, 5, 2"));
    let out = run(&["diag", "--inline", "1,1;1", "--method", "new"]);
    assert_eq!(out.status.code(), Some(2));
    let text = stdout(&run(&["oracle", "--inline", "1,1;1", "--max-order", "3"]));
    assert!(data_rows(&text).contains(&"3, 18, 18, 0.617715"), "{text}");
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    for path in [&a, &b] {
        let out = run(&[
            "gen",
            "--n",
            "5",
            "--dist",
            "uniform:0.5:2",
            "--seed",
            "7",
            "--output",
            path.to_str().unwrap(),
        ]);
        stdout(&out);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let m = bidiag_traces::parse_matrix(&fs::read_to_string(&a).unwrap()).unwrap();
    assert_eq!(m.n(), 5);
}

#[test]
fn gen_graded_and_batches() {
    let text = stdout(&run(&["gen", "--dist", "graded:10", "--n", "6"]));
    let m = bidiag_traces::parse_matrix(&text).unwrap();
    assert!((m.q()[0] / m.q()[5] / 1e5 - 1.0).abs() < 1e-12);

    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("suite");
    stdout(&run(&[
        "gen",
        "--n",
        "3",
        "--count",
        "4",
        "--output",
        out_dir.to_str().unwrap(),
    ]));
    assert_eq!(fs::read_dir(&out_dir).unwrap().count(), 4);
}

#[test]
fn gen_rejects_nonpositive_support() {
    let out = run(&["gen", "--n", "3", "--dist", "uniform:-1:1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bench_rows_and_reach() {
    let text = stdout(&run(&[
        "bench", "--n", "50", "--m", "8", "--method", "ykn12", "--method", "ykyy14", "--method",
        "new", "--reps", "1", "--format", "json",
    ]));
    let doc: Value = serde_json::from_str(&text).unwrap();
    let rows = doc["results"].as_array().unwrap();
    assert_eq!(rows.iter().filter(|r| r["table"] == "timing").count(), 3);
    let reach = |label: &str| {
        rows.iter()
            .find(|r| r["table"] == "reach" && r["method"] == label)
            .unwrap()["max_order"]
            .as_u64()
            .unwrap()
    };
    assert!(reach("new") >= reach("ykyy14"));
    assert!(reach("ykyy14") <= 170);
}

#[test]
fn bench_needs_sizes() {
    let out = run(&["bench", "--m", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_are_reproducible() {
    let args = [
        "bounds",
        "--inline",
        "0.9,1.7,0.6;1.2,0.8",
        "--max-order",
        "6",
        "--format",
        "json",
    ];
    assert_eq!(stdout(&run(&args)), stdout(&run(&args)));
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let out = run(&[
        "trace",
        "--inline",
        "2",
        "--max-order",
        "3",
        "--format",
        "csv",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(stdout(&out).is_empty());
    assert_eq!(fs::read_to_string(&path).unwrap().lines().count(), 4);
}
