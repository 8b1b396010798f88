//! Loading, overriding and validating a configuration.
//!
//! cargo run --example config_file [path]

use noma_sched::{Config, Environment};

fn main() {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/desk.toml").into());
    let cfg = match Config::load(&path) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(1);
        }
    };
    println!(
        "{path}: {} UEs, {} channels, p = {}, {} episodes",
        cfg.system.n_ues, cfg.system.n_channels, cfg.traffic.arrival_prob, cfg.ppo.episodes
    );

    let env = Environment::init_episode(&cfg.scenario(), 0).expect("valid scenario");
    println!("far group {:?}, near group {:?}", env.far(), env.near());

    for snippet in ["[system]\nn_channel = 2\n", "[traffic]\narrival_prob = 1.5\n"] {
        let outcome = Config::from_toml_str(snippet)
            .map_err(|e| e.to_string())
            .and_then(|c| c.validate().map_err(|e| e.to_string()));
        println!("{snippet:?} -> {}", outcome.err().unwrap_or_else(|| "ok".into()).trim());
    }
}
