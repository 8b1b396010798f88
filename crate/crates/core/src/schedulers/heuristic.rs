use rand_chacha::ChaCha8Rng;

use super::Scheduler;
use crate::action_space::{build_hypergraph, greedy_matching, Hyperedge};
use crate::channel::{self, Transmitter};
use crate::env::{Allocation, Environment};
use crate::error::Result;
use crate::traffic::{self, Verdict};

/// Greedy hypergraph matching over the far/near groups, with each edge
/// weighted by how many of its head-of-line tasks would succeed on its
/// channel under the current gains.
#[derive(Debug, Clone, Copy, Default)]
pub struct Heuristic;

/// Predicted successes (0, 1 or 2) for the UEs of `edge` sharing its
/// channel, assuming the CPU is split across `n_served` tasks.
pub fn edge_weight(env: &Environment, edge: &Hyperedge, n_served: usize) -> Result<f64> {
    let sys = &env.scenario().system;
    let ues: Vec<usize> = edge.ues().filter(|&u| env.has_task(u)).collect();
    if ues.is_empty() {
        return Ok(0.0);
    }
    let txs: Vec<Transmitter> = ues
        .iter()
        .map(|&ue| Transmitter {
            ue,
            gain_sq: env.channel().gain(ue, edge.channel),
            power_w: sys.ue_tx_power_w,
        })
        .collect();
    let rates = channel::noma_rates(&txs, env.noise_power_w(), sys.bandwidth_per_channel_hz)?;
    let f_share = traffic::compute_split(n_served.max(ues.len()), sys.bs_compute_hz)?;
    let mut wins = 0.0;
    for (&ue, rate) in ues.iter().zip(rates) {
        let task = env.head(ue).expect("filtered on has_task");
        let remaining = task.remaining_s(env.slot(), sys.slot_duration_s);
        if traffic::judge(task, rate, f_share, &env.ues()[ue].intent, remaining) == Verdict::Success {
            wins += 1.0;
        }
    }
    Ok(wins)
}

impl Scheduler for Heuristic {
    fn name(&self) -> &'static str {
        "heuristic"
    }

    fn decide(&mut self, env: &Environment, rng: &mut ChaCha8Rng) -> Result<Allocation> {
        let m = env.n_channels();
        let mut h = build_hypergraph(env.far(), env.near(), m, |u| env.has_task(u));
        let n_served = h.far_count().min(m) + h.near_count().min(m);
        for e in &mut h.edges {
            e.weight = edge_weight(env, e, n_served)?;
        }
        Ok(greedy_matching(&h, rng).to_allocation(m))
    }
}
