use rand_chacha::ChaCha8Rng;

use super::Scheduler;
use crate::config::SemiStaticLayout;
use crate::env::{Allocation, Environment};
use crate::error::Result;

/// Pre-allocated frame: UE pairs are fixed at episode start and cycle over
/// `ceil(pairs / M)` slots. An assigned UE transmits only when it has a task;
/// its slot is never handed to anyone else.
#[derive(Debug, Clone)]
pub struct SemiStatic {
    layout: SemiStaticLayout,
    frame: Vec<Vec<Vec<usize>>>,
}

impl SemiStatic {
    pub fn new(layout: SemiStaticLayout) -> Self {
        Self { layout, frame: Vec::new() }
    }

    pub fn frame_len(&self) -> usize {
        self.frame.len()
    }

    fn build_frame(&mut self, env: &Environment) {
        let m = env.n_channels();
        let ids: Vec<usize> = match self.layout {
            SemiStaticLayout::FarNear => {
                let (far, near) = (env.far(), env.near());
                let k = far.len().min(near.len());
                let mut v: Vec<usize> = (0..k).flat_map(|i| [far[i], near[i]]).collect();
                v.extend(&far[k..]);
                v.extend(&near[k..]);
                v
            }
            SemiStaticLayout::IdOrder => (0..env.ues().len()).collect(),
        };
        let pairs: Vec<Vec<usize>> = ids.chunks(2).map(<[usize]>::to_vec).collect();
        self.frame = pairs.chunks(m).map(<[Vec<usize>]>::to_vec).collect();
    }
}

impl Scheduler for SemiStatic {
    fn name(&self) -> &'static str {
        "semi-static"
    }

    fn reset(&mut self, env: &Environment) {
        self.build_frame(env);
    }

    fn decide(&mut self, env: &Environment, _rng: &mut ChaCha8Rng) -> Result<Allocation> {
        if self.frame.is_empty() {
            self.build_frame(env);
        }
        let slot = env.slot() as usize % self.frame.len();
        let mut alloc = Allocation::idle(env.n_channels());
        for (c, pair) in self.frame[slot].iter().enumerate() {
            alloc.channels[c] = pair.iter().copied().filter(|&u| env.has_task(u)).collect();
        }
        Ok(alloc)
    }
}
