mod common;

use std::io::Write;
use std::process::{Command, Output, Stdio};

use common::noisy_linear;

fn smd(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_smd-ama"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut pipe = child.stdin.take().unwrap();
    if let Some(s) = stdin {
        pipe.write_all(s.as_bytes()).unwrap();
    }
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn run_writes_parseable_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("d.csv");
    common::write_csv(&csv, &noisy_linear(300, 3, 0.1, 1));
    let out = dir.path().join("out");
    let o = smd(
        &[
            "run", "--data", csv.to_str().unwrap(), "--label-col", "3", "--header", "--stumps-per-dim", "6",
            "--reps", "2", "--out", out.to_str().unwrap(),
        ],
        None,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("smd-ama on d"));

    let summary: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["replicates"], 2);
    assert_eq!(summary["config"]["mu"], 0.3);
    assert_eq!(summary["config"]["beta0"], "auto");
    let metrics = std::fs::read_to_string(out.join("metrics.jsonl")).unwrap();
    for line in metrics.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["test_error"].as_f64().unwrap() <= 1.0);
    }
    let agg = std::fs::read_to_string(out.join("aggregate.csv")).unwrap();
    assert!(agg.starts_with("t,err_mean,err_std,loss_mean,loss_std,queries_mean\n"));
}

#[test]
fn prompt_oracle_reads_stdin() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("d.csv");
    common::write_csv(&csv, &noisy_linear(40, 2, 0.0, 2));
    let out = dir.path().join("out");
    let args = [
        "run", "--data", csv.to_str().unwrap(), "--label-col", "2", "--header", "--stumps-per-dim", "3", "--reps",
        "1", "--mu", "0.5", "--oracle", "prompt", "--out", out.to_str().unwrap(),
    ];
    let o = smd(&args, Some(&"+1\n".repeat(40)));
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("label (+1/-1)>"));

    let o = smd(&args, Some(""));
    assert!(!o.status.success());
    assert!(stderr(&o).contains("error:"), "{}", stderr(&o));
}

#[test]
fn bad_input_fails_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("d.csv");
    common::write_csv(&csv, &noisy_linear(50, 2, 0.1, 3));
    let data = csv.to_str().unwrap();

    let o = smd(&["run", "--data", "/nonexistent/x.csv", "--label-col", "0"], None);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("/nonexistent/x.csv"));

    let o = smd(&["run", "--data", data, "--label-col", "9", "--header"], None);
    assert!(!o.status.success());
    assert!(stderr(&o).starts_with("error:"));

    let o = smd(&["run", "--data", data, "--label-col", "2", "--header", "--mu", "1.0"], None);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("mu"));

    let o = smd(&["run", "--data", data, "--label-col", "2", "--header", "--beta0", "-1"], None);
    assert!(!o.status.success());

    let o = smd(&["run", "--data", data, "--label-col", "2", "--header", "--algo", "qbb", "--budget", "10000"], None);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("budget"));

    // header row parsed as data
    let o = smd(&["run", "--data", data, "--label-col", "2"], None);
    assert!(!o.status.success());
}
