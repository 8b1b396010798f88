use std::path::Path;
use std::process::Command;

use noma_sched::harness::{read_csv, CSV_HEADER};

const BIN: &str = env!("CARGO_BIN_EXE_noma-sched");

fn tiny_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("tiny.toml");
    std::fs::write(
        &path,
        "[system]\nn_ues = 4\nn_channels = 2\n\n[ppo]\nactor_width = 16\ncritic_width = 16\neval_every = 2\neval_episodes = 1\n",
    )
    .unwrap();
    path
}

fn run(args: &[&str]) -> std::process::Output {
    Command::new(BIN).args(args).env("RUST_LOG", "warn").output().unwrap()
}

#[test]
fn sweep_writes_merged_csv_and_shards() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny_config(dir.path());
    let out = dir.path().join("sweep");
    let o = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--scheme",
        "round-robin,heuristic,ppo",
        "--seeds",
        "2",
        "--episodes",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(out.join("metrics.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
    let rows = read_csv(&out.join("metrics.csv")).unwrap();
    // baselines: one row per episode; ppo: one per evaluation window
    assert_eq!(rows.len(), 2 * 4 + 2 * 4 + 2 * 2);
    assert!(out.join("shards/heuristic-seed2.csv").exists());
    assert!(std::fs::read_to_string(out.join("meta.toml")).unwrap().contains("fell_back"));
}

#[test]
fn train_then_eval_from_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny_config(dir.path());
    let ckpt = dir.path().join("agent.ckpt");
    let o = run(&[
        "train",
        "--config",
        cfg.to_str().unwrap(),
        "--episodes",
        "4",
        "--seeds",
        "1",
        "--out",
        dir.path().join("train").to_str().unwrap(),
        "--checkpoint",
        ckpt.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(ckpt.exists());
    let eval_out = dir.path().join("eval");
    let o = run(&[
        "eval",
        "--checkpoint",
        ckpt.to_str().unwrap(),
        "--episodes",
        "3",
        "--out",
        eval_out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_csv(&eval_out.join("metrics.csv")).unwrap();
    // the checkpoint carries the one-seed campaign it was trained with
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.scheme == "ppo" && r.collision_rate == 0.0));
}

#[test]
fn errors_exit_nonzero_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[system]\nn_uez = 3\n").unwrap();
    for args in [
        vec!["sweep", "--config", bad.to_str().unwrap()],
        vec!["sweep", "--config", "/nonexistent/config.toml"],
        vec!["eval", "--scheme", "proportional-fair"],
        vec!["eval", "--checkpoint", bad.to_str().unwrap()],
        vec!["train", "--scheme", "round-robin"],
    ] {
        let o = run(&args);
        assert!(!o.status.success(), "{args:?} should fail");
        assert!(String::from_utf8_lossy(&o.stderr).contains("error"), "{args:?}");
    }
}

#[test]
fn unwritable_output_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let o = run(&[
        "eval",
        "--scheme",
        "round-robin",
        "--episodes",
        "1",
        "--seeds",
        "1",
        "--out",
        blocker.join("sub").to_str().unwrap(),
    ]);
    assert!(!o.status.success());
}
