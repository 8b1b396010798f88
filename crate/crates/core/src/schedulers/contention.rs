use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::Scheduler;
use crate::env::{Allocation, Environment};
use crate::error::Result;

/// Random access: every UE with a pending task transmits with probability
/// `transmit_prob` on a uniformly drawn channel. A channel hit by more than
/// two transmitters loses all of them.
#[derive(Debug, Clone)]
pub struct ContentionBased {
    transmit_prob: f64,
}

impl ContentionBased {
    pub fn new(transmit_prob: f64) -> Self {
        Self { transmit_prob }
    }
}

impl Scheduler for ContentionBased {
    fn name(&self) -> &'static str {
        "contention-based"
    }

    fn decide(&mut self, env: &Environment, rng: &mut ChaCha8Rng) -> Result<Allocation> {
        let m = env.n_channels();
        let mut attempts: Vec<Vec<usize>> = vec![Vec::new(); m];
        for ue in 0..env.ues().len() {
            let transmits = rng.random::<f64>() < self.transmit_prob;
            let channel = rng.random_range(0..m);
            if transmits && env.has_task(ue) {
                attempts[channel].push(ue);
            }
        }
        let mut alloc = Allocation::idle(m);
        for (c, ues) in attempts.into_iter().enumerate() {
            if ues.len() > 2 {
                alloc.collided.extend(ues);
            } else {
                alloc.channels[c] = ues;
            }
        }
        Ok(alloc)
    }
}
