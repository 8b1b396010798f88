//! Trains the reduced-space agent on the desk-scale scenario and writes a
//! checkpoint.
//!
//! cargo run --release --example train_ppo [episodes] [ppo|ppo-full]

use noma_sched::ppo::{self, checkpoint};
use noma_sched::Config;

fn main() -> noma_sched::Result<()> {
    let cfg = Config::load(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/desk.toml"))?;
    let mut args = std::env::args().skip(1);
    let episodes = args.next().and_then(|s| s.parse().ok()).unwrap_or(300);
    let reduced = args.next().as_deref() != Some("ppo-full");

    let report = ppo::train(&cfg, reduced, 1, episodes)?;
    for row in &report.rows {
        println!(
            "episode {:>5}  success {:.3}  goodput {:>7.0} kb/s  return {:>6.1}",
            row.episode,
            row.success_norm,
            row.goodput_bps / 1e3,
            row.mean_reward
        );
    }
    if let Some(s) = report.last_update {
        println!("last update: entropy {:.3}, approx kl {:.4}, clipped {:.2}", s.entropy, s.approx_kl, s.clip_fraction);
    }

    let path = std::env::temp_dir().join("noma-sched-example.ckpt");
    checkpoint::save(&path, &cfg, 1, &report.agent)?;
    println!("{} updates, checkpoint at {}", report.updates, path.display());
    Ok(())
}
