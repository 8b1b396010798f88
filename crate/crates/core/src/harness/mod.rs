//! Experiment orchestration: episode runs, metrics, multi-seed campaigns
//! and CSV persistence.

mod campaign;
mod episode;
mod metrics;

pub use campaign::{run_campaign, run_cell, shard_path, CampaignSpec, CellResult};
pub use episode::{run_episode, run_episodes};
pub use metrics::{compute_metrics, read_csv, tail_mean, window_means, write_csv, Metrics, MetricsRow, CSV_HEADER};
