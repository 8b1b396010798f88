use rand_chacha::ChaCha8Rng;

use super::Scheduler;
use crate::env::{Allocation, Environment};
use crate::error::Result;

/// Turn taking in id order, `2M` UEs per slot, ignoring buffer state.
///
/// The selected UEs are sorted by path loss and paired far-most with
/// near-most on each channel.
#[derive(Debug, Clone, Default)]
pub struct RoundRobin {
    pointer: usize,
}

impl RoundRobin {
    pub fn pointer(&self) -> usize {
        self.pointer
    }
}

impl Scheduler for RoundRobin {
    fn name(&self) -> &'static str {
        "round-robin"
    }

    fn reset(&mut self, _env: &Environment) {
        self.pointer = 0;
    }

    fn decide(&mut self, env: &Environment, _rng: &mut ChaCha8Rng) -> Result<Allocation> {
        let n = env.ues().len();
        let m = env.n_channels();
        let take = (2 * m).min(n);
        let mut picked: Vec<usize> = (0..take).map(|k| (self.pointer + k) % n).collect();
        let ues = env.ues();
        picked.sort_by(|&a, &b| ues[b].pathloss_db.total_cmp(&ues[a].pathloss_db).then(a.cmp(&b)));

        let mut alloc = Allocation::idle(m);
        let (mut lo, mut hi) = (0usize, picked.len());
        let mut c = 0;
        while lo < hi {
            hi -= 1;
            alloc.channels[c].push(picked[lo]);
            if lo < hi {
                alloc.channels[c].push(picked[hi]);
            }
            lo += 1;
            c += 1;
        }
        self.pointer = (self.pointer + 2 * m) % n;
        Ok(alloc)
    }
}
