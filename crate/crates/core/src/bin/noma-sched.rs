use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use noma_sched::harness::{self, CampaignSpec, MetricsRow};
use noma_sched::ppo::{self, checkpoint};
use noma_sched::schedulers::{Scheduler, SchedulerKind};
use noma_sched::{seed, Config};

/// Uplink NOMA scheduling simulator. Log verbosity follows RUST_LOG.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a PPO scheduler and write a checkpoint.
    Train(Common),
    /// Run a checkpoint or a baseline scheme without learning.
    Eval(Common),
    /// Run a multi-seed campaign over several schemes.
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    /// TOML configuration; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Scheme name; `sweep` accepts a comma-separated list.
    #[arg(long)]
    scheme: Option<String>,
    /// Number of seeds, counted up from `campaign.base_seed`.
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long)]
    episodes: Option<usize>,
    /// Output directory for CSV files.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Checkpoint written by `train` and read by `eval`.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
}

impl Common {
    fn load_config(&self) -> anyhow::Result<Config> {
        let mut cfg = match &self.config {
            Some(p) => Config::load(p)?,
            None => Config::default(),
        };
        if let Some(k) = self.seeds {
            if k == 0 {
                bail!("--seeds must be at least 1");
            }
            cfg.campaign.seeds = k;
        }
        Ok(cfg)
    }

    fn seeds(&self, cfg: &Config) -> Vec<u64> {
        (0..cfg.campaign.seeds as u64).map(|i| cfg.campaign.base_seed + i).collect()
    }
}

fn write_rows(out: &Path, rows: &[MetricsRow]) -> anyhow::Result<()> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let path = out.join("metrics.csv");
    harness::write_csv(&path, rows)?;
    log::info!("wrote {} rows to {}", rows.len(), path.display());
    Ok(())
}

fn checkpoint_for(base: &Path, seed: u64, many: bool) -> PathBuf {
    if !many {
        return base.to_path_buf();
    }
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("agent");
    let name = match base.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}-seed{seed}.{ext}"),
        None => format!("{stem}-seed{seed}"),
    };
    base.with_file_name(name)
}

fn train(args: &Common) -> anyhow::Result<()> {
    let cfg = args.load_config()?;
    let scheme = SchedulerKind::from_name(args.scheme.as_deref().unwrap_or("ppo"), &cfg)?;
    let SchedulerKind::PpoAgent { reduced } = scheme else {
        bail!("{scheme} does not learn; use `eval` for baselines");
    };
    let episodes = args.episodes.unwrap_or(cfg.ppo.episodes);
    let ckpt = args.checkpoint.clone().unwrap_or_else(|| args.out.join("agent.ckpt"));
    let seeds = args.seeds(&cfg);
    let mut rows = Vec::new();
    for &s in &seeds {
        let report = ppo::train(&cfg, reduced, s, episodes)?;
        if report.fell_back {
            log::warn!("seed {s} trained at fallback actor lr {}", report.actor_lr);
        }
        let path = checkpoint_for(&ckpt, s, seeds.len() > 1);
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        checkpoint::save(&path, &cfg, s, &report.agent)?;
        log::info!("seed {s}: {} updates, checkpoint {}", report.updates, path.display());
        rows.extend(report.rows);
    }
    write_rows(&args.out, &rows)
}

fn eval(args: &Common) -> anyhow::Result<()> {
    let (cfg, mut sched): (Config, Box<dyn Scheduler>) = match (&args.checkpoint, &args.scheme) {
        (Some(path), _) => {
            let ck = checkpoint::load(path)?;
            let mut cfg = ck.config;
            if let Some(k) = args.seeds {
                cfg.campaign.seeds = k.max(1);
            }
            (cfg, Box::new(ck.agent))
        }
        (None, Some(name)) => {
            let cfg = args.load_config()?;
            let kind = SchedulerKind::from_name(name, &cfg)?;
            let sched = kind.build_baseline(&cfg)?;
            (cfg, sched)
        }
        (None, None) => bail!("eval needs --checkpoint or --scheme"),
    };
    let episodes = args.episodes.unwrap_or(cfg.ppo.eval_episodes);
    let mut rows = Vec::new();
    for s in args.seeds(&cfg) {
        let env_seeds: Vec<u64> = (0..episodes as u64).map(|e| seed::derive(s, seed::EVAL_ENV, e)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(s, seed::SCHEDULER, 0));
        for (e, &env_seed) in env_seeds.iter().enumerate() {
            let log = harness::run_episode(&cfg.scenario(), env_seed, sched.as_mut(), &mut rng)?;
            let m = harness::compute_metrics(&log, cfg.system.slot_duration_s);
            rows.push(m.row(sched.name(), s, e));
        }
    }
    write_rows(&args.out, &rows)
}

fn sweep(args: &Common) -> anyhow::Result<()> {
    let mut cfg = args.load_config()?;
    if let Some(list) = &args.scheme {
        cfg.campaign.schemes = list.split(',').map(|s| s.trim().to_string()).collect();
    }
    let spec = CampaignSpec::from_config(&cfg, args.episodes)?;
    let cells = harness::run_campaign(&cfg, &spec, Some(&args.out))?;
    for c in &cells {
        let tail = harness::tail_mean(&c.rows, 0.1);
        log::info!("{} seed {}: final success {:.3}", c.scheme, c.seed, tail.success_norm);
    }
    log::info!("wrote {}", args.out.join("metrics.csv").display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Train(a) => train(a),
        Command::Eval(a) => eval(a),
        Command::Sweep(a) => sweep(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
