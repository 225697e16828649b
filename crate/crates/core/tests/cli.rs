use std::path::Path;
use std::process::Command;

use fdrlearn::oracle::{sample, DiscreteDistribution};

const BIN: &str = env!("CARGO_BIN_EXE_fdrlearn");

fn write_sample(path: &Path, n: usize) {
    let dist = DiscreteDistribution::uniform(1, 2, &[0.1, 0.3, 0.7, 0.9]).unwrap();
    let data = sample(&dist, n, 1).unwrap();
    data.write_csv(std::fs::File::create(path).unwrap()).unwrap();
}

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(BIN).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
}

#[test]
fn learn_modes_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("train.csv");
    write_sample(&data, 400);
    let out = dir.path().join("fit.json");
    let (d, o) = (data.to_str().unwrap(), out.to_str().unwrap());

    let (code, err) = run(&["learn", "--data", d, "--mode", "lambda", "--lambda", "1", "--out", o]);
    assert_eq!(code, 0, "{err}");
    let fit: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(fit["abstained"], false);
    assert_eq!(fit["n"], 400);
    assert_eq!(fit["classifier"]["kind"], "cells");

    for (mode, flag, level) in [("fdr", "--alpha", "0.3"), ("np", "--alpha", "0.3"), ("pr", "--beta", "0.7")] {
        let (code, err) = run(&["learn", "--data", d, "--mode", mode, flag, level, "--delta", "0.05", "--k", "2", "--out", o]);
        assert_eq!(code, 0, "{mode}: {err}");
    }

    // Missing level parameter.
    assert_eq!(run(&["learn", "--data", d, "--mode", "fdr", "--delta", "0.05", "--out", o]).0, 2);
    // Level outside (0, 1).
    assert_eq!(run(&["learn", "--data", d, "--mode", "fdr", "--alpha", "1.5", "--delta", "0.05", "--out", o]).0, 2);
    // 2^40 cells.
    assert_eq!(run(&["learn", "--data", d, "--mode", "lambda", "--lambda", "1", "--k", "40", "--out", o]).0, 4);
    // Three points cannot meet the admissibility thresholds.
    let tiny = dir.path().join("tiny.csv");
    std::fs::write(&tiny, "x1,y\n0.1,0\n0.6,1\n0.9,0\n").unwrap();
    let (code, _) = run(&["learn", "--data", tiny.to_str().unwrap(), "--mode", "lambda", "--lambda", "1", "--out", o]);
    assert_eq!(code, 3);
    let fit: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(fit["abstained"], true);
    assert_eq!(fit["objective_value"], "inf");
}

#[test]
fn malformed_data_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "x1,y\n0.1,2\n").unwrap();
    let out = dir.path().join("fit.json");
    let (code, _) =
        run(&["learn", "--data", bad.to_str().unwrap(), "--mode", "lambda", "--lambda", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 2);
}

#[test]
fn experiment_commands_write_reports() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("dist.json"),
        r#"{"d": 1, "k_star": 1, "cells": [{"mass": 0.5, "eta": 0.2}, {"mass": 0.5, "eta": 0.8}]}"#,
    )
    .unwrap();
    let config = dir.path().join("bound.json");
    std::fs::write(
        &config,
        r#"{"experiment": "bound_check", "distribution": "dist.json",
            "class_spec": {"kind": "threshold", "m": 7}, "n_grid": [50, 100], "trials": 25, "delta": 0.1, "seed": 3}"#,
    )
    .unwrap();
    let out = dir.path().join("report");
    let cfg = config.to_str().unwrap();
    let (code, err) = run(&["bound-check", "--config", cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let csv = std::fs::read_to_string(out.join("records.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "experiment,n,trial,seed_stream,n_D,n_ND,abstained,regret_or_gap,violation_flags");
    assert_eq!(lines.count(), 50);
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["summaries"].as_array().unwrap().len(), 2);
    assert_eq!(summary["config"]["seed"], 3);

    // Seed and workers flags override the file; the CSV does not depend on workers.
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(run(&["--seed", "11", "--workers", "1", "bound-check", "--config", cfg, "--out", a.to_str().unwrap()]).0, 0);
    assert_eq!(run(&["bound-check", "--config", cfg, "--out", b.to_str().unwrap(), "--seed", "11", "--workers", "3"]).0, 0);
    assert_eq!(std::fs::read(a.join("records.csv")).unwrap(), std::fs::read(b.join("records.csv")).unwrap());
    assert_ne!(std::fs::read(a.join("records.csv")).unwrap(), csv.as_bytes());

    // The subcommand must match the config's experiment.
    assert_eq!(run(&["consistency", "--config", cfg, "--out", out.to_str().unwrap()]).0, 2);
}

#[test]
fn constrained_and_consistency_commands() {
    let dir = tempfile::tempdir().unwrap();
    let dist = r#"{"d": 1, "k_star": 2, "cells": [{"mass": 0.25, "eta": 0.1}, {"mass": 0.25, "eta": 0.3},
                                                   {"mass": 0.25, "eta": 0.7}, {"mass": 0.25, "eta": 0.9}]}"#;
    let constrained = dir.path().join("constrained.json");
    std::fs::write(
        &constrained,
        format!(
            r#"{{"experiment": "constrained_check", "distribution": {dist}, "class_spec": {{"kind": "histogram", "k": 2, "d": 1}},
                "n_grid": [200], "trials": 20, "delta": 0.05, "alpha": 0.25, "mode": "np", "seed": 1}}"#
        ),
    )
    .unwrap();
    let out = dir.path().join("c");
    let (code, err) = run(&["constrained", "--config", constrained.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert!(summary["summaries"][0]["joint_satisfaction_frequency"].as_f64().unwrap() >= 0.9);

    let consistency = dir.path().join("consistency.json");
    std::fs::write(
        &consistency,
        format!(
            r#"{{"experiment": "consistency", "distribution": {dist}, "class_spec": {{"kind": "schedule"}},
                "n_grid": [50, 200], "trials": 10, "lambda": 1.0, "seed": 1}}"#
        ),
    )
    .unwrap();
    let out = dir.path().join("s");
    let (code, err) = run(&["consistency", "--config", consistency.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    for s in summary["summaries"].as_array().unwrap() {
        assert_eq!(s["estimation_violations"], 0);
    }
    assert!(summary["optimum"]["value"].as_f64().is_some());
}
