//! Every baseline scheduler on the desk-scale scenario.
//!
//! cargo run --release --example baseline_comparison [episodes]

use noma_sched::harness::{run_cell, tail_mean};
use noma_sched::schedulers::SchedulerKind;
use noma_sched::Config;

fn main() -> noma_sched::Result<()> {
    let cfg = Config::load(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/desk.toml"))?;
    let episodes = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(200);

    println!(
        "{:<18} {:>8} {:>8} {:>12} {:>10} {:>8}",
        "scheme", "success", "failed", "goodput", "collision", "return"
    );
    for name in ["contention-based", "contention-free", "semi-static", "round-robin", "heuristic"] {
        let kind = SchedulerKind::from_name(name, &cfg)?;
        let mut seeds = Vec::new();
        for seed in 1..=cfg.campaign.seeds as u64 {
            seeds.push(tail_mean(&run_cell(&cfg, kind, seed, episodes)?.rows, 1.0));
        }
        let m = noma_sched::harness::Metrics::mean(&seeds);
        println!(
            "{name:<18} {:>8.3} {:>8.3} {:>10.0} k {:>10.3} {:>8.1}",
            m.success_norm,
            m.failed_norm,
            m.goodput_bps / 1e3,
            m.collision_rate,
            m.mean_reward
        );
    }
    Ok(())
}
