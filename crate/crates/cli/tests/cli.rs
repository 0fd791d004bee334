//! End-to-end CLI behavior: flags, exit codes, output layout.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fairaudit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fairaudit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_toy_csv(path: &Path) {
    let mut text = String::from("prob,outcome,site\n");
    for i in 0..60 {
        let p = (i as f64 + 0.5) / 60.0;
        let y = u8::from(i % 3 != 0);
        let site = if i % 2 == 0 { "north" } else { "south" };
        text.push_str(&format!("{p},{y},{site}\n"));
    }
    fs::write(path, text).unwrap();
}

#[test]
fn successful_run_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("toy.csv");
    write_toy_csv(&input);
    let out = dir.path().join("audit");
    let result = fairaudit(&[
        "evaluate-prob",
        "--input",
        input.to_str().unwrap(),
        "--pred-col",
        "prob",
        "--label-col",
        "outcome",
        "--positive",
        "1",
        "--group-col",
        "site",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(0));
    assert!(out.join("summary.md").exists());
    assert!(out.join("metrics.json").exists());
    for id in [
        "group_metrics",
        "roc",
        "calibration_curve",
        "calibration_large",
        "distribution",
        "number_needed",
    ] {
        assert!(out.join(format!("plots/{id}.json")).exists(), "{id}.json");
        assert!(out.join(format!("plots/{id}.svg")).exists(), "{id}.svg");
    }

    let metrics: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("metrics.json")).unwrap()).unwrap();
    for key in [
        "threshold",
        "groups",
        "fairness",
        "roc",
        "calibration",
        "distribution",
        "number_needed",
        "warnings",
    ] {
        assert!(metrics.get(key).is_some(), "metrics.json missing {key}");
    }
    assert_eq!(metrics["threshold"]["provenance"], "roc_derived");
}

#[test]
fn missing_column_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("toy.csv");
    write_toy_csv(&input);
    let result = fairaudit(&[
        "evaluate-prob",
        "--input",
        input.to_str().unwrap(),
        "--pred-col",
        "nope",
        "--label-col",
        "outcome",
        "--positive",
        "1",
        "--group-col",
        "site",
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("nope"), "{stderr}");
}

#[test]
fn out_of_range_probability_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.csv");
    fs::write(&input, "prob,outcome,site\n0.5,1,a\n1.2,0,b\n0.4,1,a\n0.2,0,b\n").unwrap();
    let result = fairaudit(&[
        "evaluate-prob",
        "--input",
        input.to_str().unwrap(),
        "--pred-col",
        "prob",
        "--label-col",
        "outcome",
        "--positive",
        "1",
        "--group-col",
        "site",
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("row 2"), "{stderr}");
}

#[test]
fn absent_reference_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("toy.csv");
    write_toy_csv(&input);
    let result = fairaudit(&[
        "evaluate-prob",
        "--input",
        input.to_str().unwrap(),
        "--pred-col",
        "prob",
        "--label-col",
        "outcome",
        "--positive",
        "1",
        "--group-col",
        "site",
        "--reference",
        "east",
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn threshold_rejected_for_binary() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bin.csv");
    fs::write(&input, "pred,outcome,g\n1,1,a\n0,0,a\n1,0,b\n0,1,b\n").unwrap();
    let result = fairaudit(&[
        "evaluate-bin",
        "--input",
        input.to_str().unwrap(),
        "--pred-col",
        "pred",
        "--label-col",
        "outcome",
        "--positive",
        "1",
        "--group-col",
        "g",
        "--threshold",
        "0.5",
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn binary_run_emits_reduced_panel_set() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bin.csv");
    let mut text = String::from("pred,outcome,g\n");
    for i in 0..40 {
        text.push_str(&format!(
            "{},{},{}\n",
            i % 2,
            u8::from(i % 3 == 0),
            if i % 2 == 0 { "a" } else { "b" }
        ));
    }
    fs::write(&input, text).unwrap();
    let out = dir.path().join("o");
    let result = fairaudit(&[
        "evaluate-bin",
        "--input",
        input.to_str().unwrap(),
        "--pred-col",
        "pred",
        "--label-col",
        "outcome",
        "--positive",
        "1",
        "--group-col",
        "g",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(0));
    assert!(out.join("plots/group_metrics.svg").exists());
    assert!(out.join("plots/calibration_large.svg").exists());
    assert!(!out.join("plots/roc.svg").exists());
    assert!(!out.join("plots/number_needed.svg").exists());

    let metrics: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("metrics.json")).unwrap()).unwrap();
    assert!(metrics["roc"].is_null());
    assert!(metrics["distribution"].is_null());
    assert_eq!(metrics["threshold"]["provenance"], "binary_fixed");
}

#[test]
fn emit_list_controls_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("toy.csv");
    write_toy_csv(&input);
    let out = dir.path().join("md_only");
    let result = fairaudit(&[
        "evaluate-prob",
        "--input",
        input.to_str().unwrap(),
        "--pred-col",
        "prob",
        "--label-col",
        "outcome",
        "--positive",
        "1",
        "--group-col",
        "site",
        "--emit",
        "md",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(0));
    assert!(out.join("summary.md").exists());
    assert!(!out.join("metrics.json").exists());
    assert!(!out.join("plots").exists());

    let result = fairaudit(&[
        "evaluate-prob",
        "--input",
        input.to_str().unwrap(),
        "--pred-col",
        "prob",
        "--label-col",
        "outcome",
        "--positive",
        "1",
        "--group-col",
        "site",
        "--emit",
        "pdf",
        "--out",
        dir.path().join("x").to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn ratio_mode_is_reflected_in_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("toy.csv");
    write_toy_csv(&input);
    let out = dir.path().join("ratio");
    let result = fairaudit(&[
        "evaluate-prob",
        "--input",
        input.to_str().unwrap(),
        "--pred-col",
        "prob",
        "--label-col",
        "outcome",
        "--positive",
        "1",
        "--group-col",
        "site",
        "--mode",
        "ratio",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(0));
    let md = fs::read_to_string(out.join("summary.md")).unwrap();
    assert!(md.contains("TPR ratio"), "{md}");
    let metrics: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("metrics.json")).unwrap()).unwrap();
    assert_eq!(metrics["fairness"]["mode"], "ratio");
}

#[test]
fn missing_input_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let result = fairaudit(&[
        "evaluate-prob",
        "--input",
        dir.path().join("absent.csv").to_str().unwrap(),
        "--pred-col",
        "prob",
        "--label-col",
        "outcome",
        "--positive",
        "1",
        "--group-col",
        "site",
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn score_subcommand_accepts_score_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("scores.csv");
    let mut text = String::from("score,outcome,g\n");
    for i in 0..80 {
        let s = (i * 7) % 101;
        let y = u8::from(s > 40 && i % 4 != 0);
        text.push_str(&format!("{s},{y},{}\n", if i % 2 == 0 { "a" } else { "b" }));
    }
    fs::write(&input, text).unwrap();
    let out = dir.path().join("o");
    let result = fairaudit(&[
        "evaluate-score",
        "--input",
        input.to_str().unwrap(),
        "--pred-col",
        "score",
        "--label-col",
        "outcome",
        "--positive",
        "1",
        "--group-col",
        "g",
        "--threshold",
        "51.5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(0));
    let metrics: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("metrics.json")).unwrap()).unwrap();
    assert_eq!(metrics["threshold"]["value"], 51.5);
    assert_eq!(metrics["threshold"]["provenance"], "user_specified");
}
