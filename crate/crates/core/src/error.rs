use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("failed to parse config {path}: {source}")]
    ConfigParse {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },

    #[error("distance must be positive, got {0} km")]
    NonPositiveDistance(f64),

    #[error("invalid channel occupancy {0} (NOMA allows 1 or 2 UEs per channel)")]
    Occupancy(usize),

    #[error("bandwidth must be positive, got {0} Hz")]
    Bandwidth(f64),

    #[error("unschedulable task: {0}")]
    Unschedulable(&'static str),

    #[error("invalid allocation: {0}")]
    Allocation(String),

    #[error("episode already finished after {0} slots")]
    EpisodeFinished(u32),

    #[error("action space: {0}")]
    ActionSpace(String),

    #[error("every action is masked")]
    AllMasked,

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite loss during update: {0}")]
    NonFiniteLoss(String),

    #[error("unknown scheme {0:?}")]
    UnknownScheme(String),

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
