//! Baseline scheduling policies.
//!
//! Every policy maps the current [`Environment`] to an [`Allocation`] and may
//! keep its own state across slots. A policy draws randomness only from the
//! generator handed to it, never from the environment's stream.

mod contention;
mod contention_free;
mod heuristic;
mod round_robin;
mod semi_static;

use std::fmt;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;

use crate::config::Config;
use crate::env::{Allocation, Environment, UeOutcome};
use crate::error::{Error, Result};

pub use contention::ContentionBased;
pub use contention_free::ContentionFree;
pub use heuristic::{edge_weight, Heuristic};
pub use round_robin::RoundRobin;
pub use semi_static::SemiStatic;

pub trait Scheduler: Send {
    fn name(&self) -> &'static str;

    /// Called once at the start of every episode.
    fn reset(&mut self, _env: &Environment) {}

    fn decide(&mut self, env: &Environment, rng: &mut ChaCha8Rng) -> Result<Allocation>;

    /// Outcomes of the slot just stepped with this policy's allocation.
    fn observe(&mut self, _env: &Environment, _outcomes: &[UeOutcome]) {}
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SchedulerKind {
    ContentionBased { transmit_prob: f64 },
    ContentionFree,
    SemiStatic,
    RoundRobin,
    HeuristicGreedy,
    /// Learned policy; `reduced` selects the hypergraph action space.
    PpoAgent { reduced: bool },
}

impl SchedulerKind {
    pub const NAMES: [&'static str; 7] = [
        "contention-based",
        "contention-free",
        "semi-static",
        "round-robin",
        "heuristic",
        "ppo",
        "ppo-full",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SchedulerKind::ContentionBased { .. } => "contention-based",
            SchedulerKind::ContentionFree => "contention-free",
            SchedulerKind::SemiStatic => "semi-static",
            SchedulerKind::RoundRobin => "round-robin",
            SchedulerKind::HeuristicGreedy => "heuristic",
            SchedulerKind::PpoAgent { reduced: true } => "ppo",
            SchedulerKind::PpoAgent { reduced: false } => "ppo-full",
        }
    }

    /// Parses a scheme name, taking per-scheme parameters from `cfg`.
    pub fn from_name(name: &str, cfg: &Config) -> Result<Self> {
        Ok(match name {
            "contention-based" => SchedulerKind::ContentionBased {
                transmit_prob: cfg.schedulers.contention_prob,
            },
            "contention-free" => SchedulerKind::ContentionFree,
            "semi-static" => SchedulerKind::SemiStatic,
            "round-robin" => SchedulerKind::RoundRobin,
            "heuristic" => SchedulerKind::HeuristicGreedy,
            "ppo" => SchedulerKind::PpoAgent { reduced: true },
            "ppo-full" => SchedulerKind::PpoAgent { reduced: false },
            other => return Err(Error::UnknownScheme(other.to_string())),
        })
    }

    pub fn is_learned(&self) -> bool {
        matches!(self, SchedulerKind::PpoAgent { .. })
    }

    pub fn is_centralized(&self) -> bool {
        !matches!(self, SchedulerKind::ContentionBased { .. })
    }

    /// Builds a non-learning policy. Learned policies come from training or
    /// a checkpoint instead.
    pub fn build_baseline(&self, cfg: &Config) -> Result<Box<dyn Scheduler>> {
        Ok(match *self {
            SchedulerKind::ContentionBased { transmit_prob } => {
                Box::new(ContentionBased::new(transmit_prob))
            }
            SchedulerKind::ContentionFree => Box::new(ContentionFree::default()),
            SchedulerKind::SemiStatic => Box::new(SemiStatic::new(cfg.schedulers.semi_static_layout)),
            SchedulerKind::RoundRobin => Box::new(RoundRobin::default()),
            SchedulerKind::HeuristicGreedy => Box::new(Heuristic),
            SchedulerKind::PpoAgent { .. } => {
                return Err(Error::Config(format!("{} needs training or a checkpoint", self.name())))
            }
        })
    }
}

impl fmt::Display for SchedulerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchedulerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_name(s, &Config::default())
    }
}

/// Puts far/near pairs on channels first, then pairs the leftovers in order.
/// At most `2 * n_channels` UEs are placed; the rest are ignored.
pub(crate) fn pair_onto_channels(env: &Environment, ues: &[usize], n_channels: usize) -> Allocation {
    use crate::env::Group;
    let far: Vec<usize> = ues.iter().copied().filter(|&u| env.ues()[u].group == Group::Far).collect();
    let near: Vec<usize> = ues.iter().copied().filter(|&u| env.ues()[u].group == Group::Near).collect();
    let k = far.len().min(near.len());
    let mut groups: Vec<Vec<usize>> = (0..k).map(|i| vec![far[i], near[i]]).collect();
    let rest: Vec<usize> = far[k..].iter().chain(&near[k..]).copied().collect();
    groups.extend(rest.chunks(2).map(<[usize]>::to_vec));
    let mut alloc = Allocation::idle(n_channels);
    for (m, g) in groups.into_iter().take(n_channels).enumerate() {
        alloc.channels[m] = g;
    }
    alloc
}
