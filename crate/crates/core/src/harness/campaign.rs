use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Serialize;

use crate::config::Config;
use crate::env::EpisodeLog;
use crate::error::{Error, Result};
use crate::ppo;
use crate::schedulers::SchedulerKind;
use crate::seed;

use super::episode::run_episodes;
use super::metrics::{compute_metrics, read_csv, write_csv, MetricsRow};

/// What to run: every scheme against every seed.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignSpec {
    pub schemes: Vec<SchedulerKind>,
    pub seeds: Vec<u64>,
    pub episodes: usize,
    /// Worker threads; 0 means one per available core.
    pub jobs: usize,
}

impl CampaignSpec {
    /// Schemes, seeds and jobs from the `[campaign]` section; `episodes`
    /// defaults to `ppo.episodes`.
    pub fn from_config(cfg: &Config, episodes: Option<usize>) -> Result<Self> {
        let names: Vec<&str> = if cfg.campaign.schemes.is_empty() {
            SchedulerKind::NAMES.to_vec()
        } else {
            cfg.campaign.schemes.iter().map(String::as_str).collect()
        };
        let schemes = names
            .into_iter()
            .map(|n| SchedulerKind::from_name(n, cfg))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            schemes,
            seeds: (0..cfg.campaign.seeds as u64).map(|i| cfg.campaign.base_seed + i).collect(),
            episodes: episodes.unwrap_or(cfg.ppo.episodes),
            jobs: cfg.campaign.jobs,
        })
    }
}

/// Output of one (scheme, seed) cell.
#[derive(Debug, Clone)]
pub struct CellResult {
    pub scheme: SchedulerKind,
    pub seed: u64,
    /// Baselines: one row per episode. Learned schemes: one per evaluation window.
    pub rows: Vec<MetricsRow>,
    /// Every simulated training or evaluation episode.
    pub logs: Vec<EpisodeLog>,
    pub actor_lr: Option<f64>,
    pub fell_back: bool,
}

pub fn run_cell(cfg: &Config, scheme: SchedulerKind, seed: u64, episodes: usize) -> Result<CellResult> {
    if let SchedulerKind::PpoAgent { reduced } = scheme {
        let report = ppo::train(cfg, reduced, seed, episodes)?;
        return Ok(CellResult {
            scheme,
            seed,
            rows: report.rows,
            logs: report.training_logs,
            actor_lr: Some(report.actor_lr),
            fell_back: report.fell_back,
        });
    }
    let mut sched = scheme.build_baseline(cfg)?;
    let env_seeds: Vec<u64> = (0..episodes as u64).map(|e| seed::derive(seed, seed::ENV, e)).collect();
    let logs = run_episodes(&cfg.scenario(), &env_seeds, sched.as_mut(), seed::derive(seed, seed::SCHEDULER, 0))?;
    let rows = logs
        .iter()
        .enumerate()
        .map(|(e, l)| compute_metrics(l, cfg.system.slot_duration_s).row(scheme.name(), seed, e))
        .collect();
    Ok(CellResult {
        scheme,
        seed,
        rows,
        logs,
        actor_lr: None,
        fell_back: false,
    })
}

#[derive(Serialize)]
struct Meta<'a> {
    episodes: usize,
    cells: Vec<CellMeta<'a>>,
}

#[derive(Serialize)]
struct CellMeta<'a> {
    scheme: &'a str,
    seed: u64,
    rows: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    actor_lr: Option<f64>,
    fell_back: bool,
}

pub fn shard_path(out_dir: &Path, scheme: SchedulerKind, seed: u64) -> PathBuf {
    out_dir.join("shards").join(format!("{}-seed{seed}.csv", scheme.name()))
}

/// Runs all cells, in parallel over `spec.jobs` threads.
///
/// With an output directory each cell writes `shards/<scheme>-seed<k>.csv`;
/// once all cells finish the shards are merged in (scheme, seed) order into
/// `metrics.csv`, and `meta.toml` records per-cell learning-rate fallbacks.
/// Results are returned in the same order.
pub fn run_campaign(cfg: &Config, spec: &CampaignSpec, out_dir: Option<&Path>) -> Result<Vec<CellResult>> {
    if spec.schemes.is_empty() || spec.seeds.is_empty() {
        return Err(Error::Config("a campaign needs at least one scheme and one seed".into()));
    }
    cfg.validate()?;
    if let Some(dir) = out_dir {
        let shards = dir.join("shards");
        std::fs::create_dir_all(&shards).map_err(|e| Error::io(&shards, e))?;
    }
    let cells: Vec<(SchedulerKind, u64)> = spec
        .schemes
        .iter()
        .flat_map(|&s| spec.seeds.iter().map(move |&k| (s, k)))
        .collect();
    let jobs = match spec.jobs {
        0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
        j => j,
    }
    .min(cells.len());
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<CellResult>>>> = Mutex::new((0..cells.len()).map(|_| None).collect());

    std::thread::scope(|s| {
        for _ in 0..jobs {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(scheme, seed)) = cells.get(i) else { break };
                log::info!("running {scheme} seed {seed}");
                let res = run_cell(cfg, scheme, seed, spec.episodes).and_then(|cell| {
                    if let Some(dir) = out_dir {
                        write_csv(&shard_path(dir, scheme, seed), &cell.rows)?;
                    }
                    Ok(cell)
                });
                results.lock().expect("no worker panicked")[i] = Some(res);
            });
        }
    });

    let cells: Vec<CellResult> = results
        .into_inner()
        .expect("no worker panicked")
        .into_iter()
        .map(|r| r.expect("every cell ran"))
        .collect::<Result<_>>()?;

    if let Some(dir) = out_dir {
        let mut merged = Vec::new();
        for c in &cells {
            merged.extend(read_csv(&shard_path(dir, c.scheme, c.seed))?);
        }
        write_csv(&dir.join("metrics.csv"), &merged)?;
        let meta = Meta {
            episodes: spec.episodes,
            cells: cells
                .iter()
                .map(|c| CellMeta {
                    scheme: c.scheme.name(),
                    seed: c.seed,
                    rows: c.rows.len(),
                    actor_lr: c.actor_lr,
                    fell_back: c.fell_back,
                })
                .collect(),
        };
        let path = dir.join("meta.toml");
        let text = toml::to_string(&meta).expect("metadata serializes");
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    }
    Ok(cells)
}
