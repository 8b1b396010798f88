//! A small multi-seed campaign written to CSV shards and merged.
//!
//! cargo run --release --example campaign_sweep [out_dir]

use std::path::PathBuf;

use noma_sched::harness::{read_csv, run_campaign, tail_mean, CampaignSpec};
use noma_sched::Config;

fn main() -> noma_sched::Result<()> {
    let mut cfg = Config::load(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/desk.toml"))?;
    cfg.campaign.seeds = 2;
    cfg.campaign.schemes = vec!["round-robin".into(), "heuristic".into(), "ppo".into()];
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("noma-sched-sweep"));

    let spec = CampaignSpec::from_config(&cfg, Some(60))?;
    let cells = run_campaign(&cfg, &spec, Some(&out))?;
    for c in &cells {
        println!(
            "{:<12} seed {}  {:>3} rows  final success {:.3}",
            c.scheme,
            c.seed,
            c.rows.len(),
            tail_mean(&c.rows, 0.1).success_norm
        );
    }
    let merged = read_csv(&out.join("metrics.csv"))?;
    println!("{} rows in {}", merged.len(), out.join("metrics.csv").display());
    Ok(())
}
