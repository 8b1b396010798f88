use rand_chacha::ChaCha8Rng;

use super::{pair_onto_channels, Scheduler};
use crate::env::{Allocation, Environment, OutcomeKind, UeOutcome};
use crate::error::Result;

/// Request/grant access.
///
/// A UE with a pending task and nothing outstanding sends a scheduling
/// request in slot `t`; the BS grants it in `t + 1` (first come first served,
/// lower id first, at most two UEs per channel) and the UE transmits in
/// `t + 2`. Grants last one slot. A request sent in the same slot as a
/// successful transmission is dropped by the ACK, so the UE asks again later.
#[derive(Debug, Clone, Default)]
pub struct ContentionFree {
    /// (request slot, ue), waiting for a grant.
    requests: Vec<(u32, usize)>,
    /// Granted this slot, transmitting next slot.
    granted: Vec<usize>,
    /// Transmitting in the current slot.
    transmitting: Vec<usize>,
    /// UE has a request, grant or transmission in flight.
    outstanding: Vec<bool>,
}

impl ContentionFree {
    pub fn pending_requests(&self) -> usize {
        self.requests.len()
    }
}

impl Scheduler for ContentionFree {
    fn name(&self) -> &'static str {
        "contention-free"
    }

    fn reset(&mut self, env: &Environment) {
        *self = Self {
            outstanding: vec![false; env.ues().len()],
            ..Default::default()
        };
    }

    fn decide(&mut self, env: &Environment, _rng: &mut ChaCha8Rng) -> Result<Allocation> {
        if self.outstanding.len() != env.ues().len() {
            self.reset(env);
        }
        let slot = env.slot();
        let m = env.n_channels();

        self.transmitting = std::mem::take(&mut self.granted);
        let alloc = pair_onto_channels(env, &self.transmitting, m);

        self.requests.sort_unstable();
        let ready = self.requests.iter().filter(|(s, _)| *s < slot).count();
        let take = ready.min(2 * m);
        self.granted = self.requests.drain(..take).map(|(_, ue)| ue).collect();

        for ue in 0..env.ues().len() {
            if env.has_task(ue) && !self.outstanding[ue] {
                self.requests.push((slot, ue));
                self.outstanding[ue] = true;
            }
        }
        Ok(alloc)
    }

    fn observe(&mut self, env: &Environment, outcomes: &[UeOutcome]) {
        let slot = env.slot().saturating_sub(1);
        for &ue in &self.transmitting {
            self.outstanding[ue] = false;
            let succeeded = outcomes
                .iter()
                .any(|o| o.ue == ue && matches!(o.kind, OutcomeKind::Success { .. }));
            let still_pending = outcomes
                .iter()
                .any(|o| o.ue == ue && matches!(o.kind, OutcomeKind::Failure(_)));
            if !succeeded && still_pending {
                self.requests.push((slot, ue));
                self.outstanding[ue] = true;
            }
        }
        self.transmitting.clear();
    }
}
