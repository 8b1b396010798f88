use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::env::EpisodeLog;
use crate::error::{Error, Result};

/// One CSV row.
///
/// `success_norm` and `failed_norm` are fractions of the tasks that arrived
/// during the episode; tasks still queued at the end count in neither.
/// `mean_reward` is the undiscounted episode return.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub scheme: String,
    pub seed: u64,
    pub episode: usize,
    pub success_norm: f64,
    pub failed_norm: f64,
    pub goodput_bps: f64,
    pub collision_rate: f64,
    pub mean_reward: f64,
}

pub const CSV_HEADER: &str = "scheme,seed,episode,success_norm,failed_norm,goodput_bps,collision_rate,mean_reward";

/// Metric values of one or more episodes.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Metrics {
    pub success_norm: f64,
    pub failed_norm: f64,
    pub goodput_bps: f64,
    pub collision_rate: f64,
    pub mean_reward: f64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn compute_metrics(log: &EpisodeLog, slot_duration_s: f64) -> Metrics {
    let wall = f64::from(log.slots) * slot_duration_s;
    Metrics {
        success_norm: ratio(log.successes, log.arrivals),
        failed_norm: ratio(log.failed(), log.arrivals),
        goodput_bps: if wall > 0.0 { log.success_bits as f64 / wall } else { 0.0 },
        collision_rate: ratio(log.collisions, log.transmissions),
        mean_reward: log.reward_sum,
    }
}

impl Metrics {
    /// Field-wise mean; zeros for an empty slice.
    pub fn mean(all: &[Metrics]) -> Metrics {
        if all.is_empty() {
            return Metrics::default();
        }
        let n = all.len() as f64;
        let sum = |f: fn(&Metrics) -> f64| all.iter().map(f).sum::<f64>() / n;
        Metrics {
            success_norm: sum(|m| m.success_norm),
            failed_norm: sum(|m| m.failed_norm),
            goodput_bps: sum(|m| m.goodput_bps),
            collision_rate: sum(|m| m.collision_rate),
            mean_reward: sum(|m| m.mean_reward),
        }
    }

    pub fn row(&self, scheme: &str, seed: u64, episode: usize) -> MetricsRow {
        MetricsRow {
            scheme: scheme.to_string(),
            seed,
            episode,
            success_norm: self.success_norm,
            failed_norm: self.failed_norm,
            goodput_bps: self.goodput_bps,
            collision_rate: self.collision_rate,
            mean_reward: self.mean_reward,
        }
    }
}

impl MetricsRow {
    pub fn metrics(&self) -> Metrics {
        Metrics {
            success_norm: self.success_norm,
            failed_norm: self.failed_norm,
            goodput_bps: self.goodput_bps,
            collision_rate: self.collision_rate,
            mean_reward: self.mean_reward,
        }
    }
}

/// Mean of the last `ceil(frac * len)` rows (at least one).
pub fn tail_mean(rows: &[MetricsRow], frac: f64) -> Metrics {
    if rows.is_empty() {
        return Metrics::default();
    }
    let k = ((rows.len() as f64 * frac).ceil() as usize).clamp(1, rows.len());
    let tail: Vec<Metrics> = rows[rows.len() - k..].iter().map(MetricsRow::metrics).collect();
    Metrics::mean(&tail)
}

/// Means over consecutive non-overlapping windows of `width` rows; a short
/// last window is kept.
pub fn window_means(rows: &[MetricsRow], width: usize) -> Vec<Metrics> {
    rows.chunks(width.max(1))
        .map(|c| Metrics::mean(&c.iter().map(MetricsRow::metrics).collect::<Vec<_>>()))
        .collect()
}

pub fn write_csv(path: &Path, rows: &[MetricsRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    if rows.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_csv(path: &Path) -> Result<Vec<MetricsRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != CSV_HEADER {
        return Err(Error::Config(format!("{} has header {:?}", path.display(), header.join(","))));
    }
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}
