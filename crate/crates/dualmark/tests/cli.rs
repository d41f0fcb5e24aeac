//! End-to-end checks of the installed binary: the full
//! train/gen/attack/detect/calibrate/eval loop in a temp directory, plus
//! the documented exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dualmark"))
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("spawn dualmark");
    assert!(
        out.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr),
    );
    out
}

fn jsonl_lines(path: &Path) -> Vec<serde_json::Value> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn pipeline_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name);
    let weights = p("weights.json");

    // Small but real training run.
    run_ok(bin().args(["train", "--docs", "120", "--epochs", "2", "--seed", "9"]).arg("--out").arg(&weights));
    assert!(weights.exists());

    // Watermarked generation with traces.
    let docs = p("docs.jsonl");
    let traces = p("traces.jsonl");
    run_ok(
        bin()
            .args(["gen", "--docs", "3", "--max-tokens", "40", "--seed", "5"])
            .arg("--weights").arg(&weights)
            .arg("--out").arg(&docs)
            .arg("--traces").arg(&traces),
    );
    assert_eq!(jsonl_lines(&docs).len(), 3);
    assert_eq!(jsonl_lines(&traces).len(), 3);

    // Paraphrase attack keeps the document count.
    let para = p("para.jsonl");
    run_ok(
        bin()
            .args(["attack", "--mode", "paraphrase", "--seed", "3"])
            .arg("--input").arg(&docs)
            .arg("--out").arg(&para),
    );
    assert_eq!(jsonl_lines(&para).len(), 3);

    // Detection reports carry all three scores and a label.
    let reports = p("reports.jsonl");
    run_ok(
        bin()
            .arg("detect")
            .arg("--input").arg(&para)
            .arg("--weights").arg(&weights)
            .arg("--out").arg(&reports),
    );
    let reports = jsonl_lines(&reports);
    assert_eq!(reports.len(), 3);
    for r in &reports {
        assert!(r["score_wd"].is_number());
        assert!(r["score_sd"].is_number());
        assert!(r["score_st"].is_number());
        assert!(r["label"].is_string());
    }

    // Calibrate theta_wd from score samples, then detect against it.
    let pos = p("pos.json");
    let neg = p("neg.json");
    fs::write(&pos, "[0.8, 0.9, 1.0, 1.1]").unwrap();
    fs::write(&neg, "[0.0, 0.1, 0.2, 0.3]").unwrap();
    let thresholds = p("thresholds.json");
    run_ok(
        bin()
            .args(["calibrate", "--score", "wd", "--fpr", "0.25", "--dataset", "smoke"])
            .arg("--positives").arg(&pos)
            .arg("--negatives").arg(&neg)
            .arg("--out").arg(&thresholds),
    );
    let th: serde_json::Value = serde_json::from_str(&fs::read_to_string(&thresholds).unwrap()).unwrap();
    assert!(th["theta_wd"].as_f64().unwrap() > 0.2);
    assert_eq!(th["provenance"]["kind"], "calibrated");
    run_ok(
        bin()
            .arg("detect")
            .arg("--input").arg(&docs)
            .arg("--weights").arg(&weights)
            .arg("--thresholds").arg(&thresholds)
            .arg("--out").arg(p("reports2.jsonl")),
    );

    // Tiny four-protocol eval writes both table formats.
    let table_json = p("table.json");
    let table_csv = p("table.csv");
    run_ok(
        bin()
            .args(["eval", "--docs", "3"])
            .arg("--weights").arg(&weights)
            .arg("--out-json").arg(&table_json)
            .arg("--out-csv").arg(&table_csv),
    );
    let table: serde_json::Value = serde_json::from_str(&fs::read_to_string(&table_json).unwrap()).unwrap();
    assert_eq!(table["rows"].as_array().unwrap().len(), 4);
    let csv = fs::read_to_string(&table_csv).unwrap();
    assert!(csv.starts_with("protocol,score,auc,"));
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn missing_artifact_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["gen", "--docs", "1"])
        .arg("--weights").arg(dir.path().join("no-such-weights.json"))
        .arg("--out").arg(dir.path().join("docs.jsonl"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn invalid_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let pos = dir.path().join("pos.json");
    let neg = dir.path().join("neg.json");
    fs::write(&pos, "[1.0, 2.0]").unwrap();
    fs::write(&neg, "[0.0, 0.5]").unwrap();
    let out = bin()
        .args(["calibrate", "--score", "wd", "--fpr", "1.5"])
        .arg("--positives").arg(&pos)
        .arg("--negatives").arg(&neg)
        .arg("--out").arg(dir.path().join("th.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn usage_error_exits_2() {
    let out = bin().arg("gen").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
