//! Black-box tests of the `mmwave-vr` binary.

use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_mmwave-vr");
const DEFAULT_CONF: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/default.conf");
const HEADER: &str = "scenario,n_tx,n_rf,esn0_db,ap,user,rate_dl_bps,rate_ul_bps,d_trans_s,d_proc_s,d_queue_s,d_total_s,utility,feasible,violations";

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn simulate_into(out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "simulate",
        "--config",
        DEFAULT_CONF,
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn simulate_writes_results_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = simulate_into(dir.path(), &[]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(HEADER));
    assert_eq!(lines.count(), 1008);
    assert!(dir.path().join("summary.csv").exists());
}

#[test]
fn simulate_overrides_narrow_the_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let out = simulate_into(
        dir.path(),
        &[
            "--scenario",
            "min",
            "--esn0",
            "0:10:20",
            "--codebook",
            "8x2",
            "--seed",
            "3",
            "--queue-units",
            "reciprocal",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 3 * 4);
    assert!(rows.iter().all(|r| r.starts_with("min,8,2,")));
    assert!(rows.iter().all(|r| r.split(',').nth(10) == Some("5e-10")));
}

#[test]
fn simulate_is_byte_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    simulate_into(a.path(), &["--esn0", "0:4:20"]);
    simulate_into(b.path(), &["--esn0", "0:4:20"]);
    assert_eq!(
        std::fs::read(a.path().join("results.csv")).unwrap(),
        std::fs::read(b.path().join("results.csv")).unwrap()
    );
}

#[test]
fn stats_reports_min_and_mode_per_link() {
    let dir = tempfile::tempdir().unwrap();
    simulate_into(dir.path(), &["--codebook", "2x1"]);
    let input = dir.path().join("results.csv");
    for metric in ["min", "mode"] {
        let out = run(&[
            "stats",
            "--in",
            input.to_str().unwrap(),
            "--metric",
            metric,
            "--bin",
            "1e-6",
        ]);
        assert_eq!(out.status.code(), Some(0));
        let stdout = String::from_utf8(out.stdout).unwrap();
        let mut lines = stdout.lines();
        assert_eq!(
            lines.next().unwrap(),
            format!("scenario,n_tx,n_rf,ap,user,{metric}_d_trans_s")
        );
        assert_eq!(lines.count(), 2 * 4);
    }
}

#[test]
fn check_config_accepts_the_shipped_file() {
    let out = run(&["check-config", "--config", DEFAULT_CONF]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok:"));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.conf");
    std::fs::write(&bad, "n_t = 2\nmystery = 4\n").unwrap();
    assert_eq!(
        run(&["check-config", "--config", bad.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );

    std::fs::write(&bad, "mu = 1\nlambda = 2\n").unwrap();
    assert_eq!(
        run(&["check-config", "--config", bad.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );

    let out = simulate_into(dir.path(), &["--esn0", "5:1:0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn io_errors_exit_with_three() {
    assert_eq!(
        run(&["check-config", "--config", "/nonexistent/cfg.conf"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        run(&[
            "stats",
            "--in",
            "/nonexistent/results.csv",
            "--metric",
            "min"
        ])
        .status
        .code(),
        Some(3)
    );
    // Output directory path blocked by a regular file.
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let out = simulate_into(&blocker.join("sub"), &["--codebook", "2x1"]);
    assert_eq!(out.status.code(), Some(3));
}
