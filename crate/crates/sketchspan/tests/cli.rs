//! End-to-end checks of the command-line interface: file formats, CSV
//! output, exit codes, config handling, and replayability.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sketchspan"))
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("sketchspan_cli_{}_{name}", std::process::id()));
    p
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn run_path_delete_stream() {
    let stream = tmp("path.stream");
    std::fs::write(&stream, "n 4\n+ 0 1\n+ 1 2\n+ 2 3\n- 1 2\n?\n").unwrap();
    let out = bin()
        .args(["run", stream.to_str().unwrap(), "--delta", "0.1", "--seed", "7"])
        .output()
        .unwrap();
    let text = stdout(&out);
    assert!(text.starts_with("query_index,valid,forest_edge_count,component_count\n"));
    // the only spanning forest of the remaining graph has 2 edges / 2 components
    assert!(text.contains("0,true,2,2"), "{text}");
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn run_query_on_empty_graph() {
    let stream = tmp("empty.stream");
    std::fs::write(&stream, "n 5\n?\n").unwrap();
    let out = bin()
        .args(["run", stream.to_str().unwrap(), "--delta", "0.2", "--seed", "1"])
        .output()
        .unwrap();
    assert!(stdout(&out).contains("0,true,0,5"));
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn run_rejects_malformed_streams() {
    let stream = tmp("bad.stream");
    std::fs::write(&stream, "n 5\n+ 3 3\n").unwrap();
    let out = bin().args(["run", stream.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let absent = tmp("missing.stream");
    let out = bin().args(["run", absent.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exp_failure_is_replayable() {
    let args = ["exp", "failure", "--n", "24", "--delta", "0.1", "--trials", "3", "--seed", "5"];
    let a = bin().args(args).output().unwrap();
    let b = bin().args(args).output().unwrap();
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), Some(0));
    let text = stdout(&a);
    assert!(text.starts_with("seed,n,delta,trial,valid\n"));
    assert!(text.lines().count() == 1 + 3 + 1, "{text}"); // header, trials, summary
    assert!(text.contains("summary"));
}

#[test]
fn exp_scaling_columns_are_monotone_and_consistent() {
    let out = bin()
        .args(["exp", "scaling", "--n", "64,128,256", "--seed", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut prev_bits = 0u64;
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        let n: u64 = fields[1].parse().unwrap();
        let total_bits: u64 = fields[3].parse().unwrap();
        let avg: f64 = fields[4].parse().unwrap();
        assert!(total_bits > prev_bits, "total bits monotone in n");
        prev_bits = total_bits;
        assert_eq!(avg * n as f64, total_bits as f64, "shared layout accounting");
    }
}

#[test]
fn sim_dist_runs_a_graph_file() {
    let graph = tmp("star.graph");
    std::fs::write(&graph, "n 6\n0 1\n0 2\n0 3 # star\n").unwrap();
    let out = bin()
        .args(["sim", "dist", graph.to_str().unwrap(), "--delta", "0.1", "--seed", "3"])
        .output()
        .unwrap();
    let text = stdout(&out);
    assert!(text.starts_with("n,delta,seed,valid,avg_bits,max_bits\n"));
    assert!(text.lines().nth(1).unwrap().starts_with("6,0.1,3,"));
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn lab_dsk_rejects_non_fifth_powers() {
    let out = bin().args(["lab", "dsk", "--n", "1000", "--trials", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lab_dsk_small_run_is_clean() {
    let out = bin()
        .args(["lab", "dsk", "--n", "1024", "--trials", "5", "--seed", "4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.lines().last().unwrap().ends_with(",0"), "{text}");
}

#[test]
fn lab_encdec_always_fail_roundtrips() {
    let out = bin()
        .args(["lab", "encdec", "--trials", "5", "--seed", "6", "--u", "64",
               "--ur-delta", "0.001953125", "--c-size", "3", "--c-r", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("always_fail,summary"), "{text}");
    assert!(text.contains("5/5"));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let cfg = tmp("exp.config");
    std::fs::write(&cfg, "n = 24\ndelta = 0.1\ntrials = 2\nseed = 9\n").unwrap();
    let from_cfg = bin()
        .args(["exp", "failure", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    let text = stdout(&from_cfg);
    assert!(text.contains("9,24,0.1,0,"), "{text}");

    // a flag beats the config value
    let overridden = bin()
        .args(["exp", "failure", "--config", cfg.to_str().unwrap(), "--trials", "1"])
        .output()
        .unwrap();
    assert_eq!(stdout(&overridden).lines().count(), 1 + 1 + 1);
}

#[test]
fn env_seed_is_the_default() {
    let out = bin()
        .args(["exp", "failure", "--n", "16", "--delta", "0.2", "--trials", "1"])
        .env("SKETCHSPAN_SEED", "77")
        .output()
        .unwrap();
    assert!(stdout(&out).contains("77,16,0.2,0,"), "{}", stdout(&out));
}

#[test]
fn out_flag_writes_the_file() {
    let csv = tmp("failure.csv");
    let _ = std::fs::remove_file(&csv);
    let out = bin()
        .args([
            "exp", "failure", "--n", "16", "--delta", "0.2", "--trials", "1", "--seed", "8",
            "--out", csv.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("seed,n,delta,trial,valid\n"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(bin().args(["frobnicate"]).output().unwrap().status.code(), Some(2));
    assert_eq!(bin().args(["exp"]).output().unwrap().status.code(), Some(2));
    assert_eq!(
        bin().args(["exp", "failure", "--n", "abc"]).output().unwrap().status.code(),
        Some(2)
    );
}
