//! Fixed index maps between policy outputs and allocations.
//!
//! Both codecs address UEs by *position*: positions `0..F` are the far group
//! and `F..N` the near group, each in ascending id, matching
//! [`Environment::order`]. Group membership is redrawn every episode, so the
//! position, not the UE id, is what stays stable across episodes.

use crate::env::{Allocation, Environment};
use crate::error::{Error, Result};

use super::combinatorics::count_full_actions;

/// Upper bound on the number of actions a codec will materialize.
pub const MAX_CODEC_ACTIONS: usize = 1 << 20;

pub trait ActionCodec: Send + Sync {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Which actions are valid in the current slot.
    fn mask(&self, env: &Environment) -> Vec<bool>;

    fn decode(&self, index: usize, env: &Environment) -> Allocation;
}

/// Per-channel `(far slot, near slot)`; `None` is the placeholder.
type ReducedAction = Vec<(Option<usize>, Option<usize>)>;

/// Index map over the far/near matchings.
///
/// The action list covers every eligibility pattern: each group places
/// `M` slots, real ranks distinct, placeholders allowed. The mask keeps
/// exactly the matchings [`super::enumerate_reduced_actions`] would list
/// for the current hypergraph.
#[derive(Debug, Clone)]
pub struct ReducedCodec {
    n_far: usize,
    n_near: usize,
    n_channels: usize,
    actions: Vec<ReducedAction>,
}

impl ReducedCodec {
    pub fn new(n_far: usize, n_near: usize, n_channels: usize) -> Result<Self> {
        let far = arrangements(n_far, n_channels);
        let near = arrangements(n_near, n_channels);
        let total = far.len().saturating_mul(near.len());
        if total > MAX_CODEC_ACTIONS {
            return Err(Error::ActionSpace(format!(
                "reduced space has {total} actions, above the {MAX_CODEC_ACTIONS} limit"
            )));
        }
        // Lexicographic in (channel, far, near): compare the interleaved tuple.
        let mut actions: Vec<ReducedAction> = far
            .iter()
            .flat_map(|f| near.iter().map(move |r| f.iter().copied().zip(r.iter().copied()).collect()))
            .collect();
        actions.sort_by(|a: &ReducedAction, b: &ReducedAction| {
            a.iter()
                .zip(b)
                .map(|(x, y)| slot_key(x.0).cmp(&slot_key(y.0)).then(slot_key(x.1).cmp(&slot_key(y.1))))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        Ok(Self {
            n_far,
            n_near,
            n_channels,
            actions,
        })
    }

    pub fn for_env(env: &Environment) -> Result<Self> {
        Self::new(env.far().len(), env.near().len(), env.n_channels())
    }

    pub fn action(&self, index: usize) -> &[(Option<usize>, Option<usize>)] {
        &self.actions[index]
    }

    pub fn n_far(&self) -> usize {
        self.n_far
    }

    pub fn n_near(&self) -> usize {
        self.n_near
    }

    /// Mask for explicit eligibility flags by far rank and near rank.
    pub fn mask_for(&self, far_ok: &[bool], near_ok: &[bool]) -> Vec<bool> {
        let want_far = far_ok.iter().filter(|&&b| b).count().min(self.n_channels);
        let want_near = near_ok.iter().filter(|&&b| b).count().min(self.n_channels);
        self.actions
            .iter()
            .map(|a| {
                let fine = |slots: &mut dyn Iterator<Item = Option<usize>>, ok: &[bool], want: usize| {
                    let mut real = 0;
                    for rank in slots.flatten() {
                        if !ok[rank] {
                            return false;
                        }
                        real += 1;
                    }
                    real == want
                };
                fine(&mut a.iter().map(|p| p.0), far_ok, want_far)
                    && fine(&mut a.iter().map(|p| p.1), near_ok, want_near)
            })
            .collect()
    }
}

fn slot_key(s: Option<usize>) -> usize {
    s.unwrap_or(usize::MAX)
}

/// Length-`m` sequences over `0..n` plus a repeatable placeholder, with no
/// real rank repeated.
fn arrangements(n: usize, m: usize) -> Vec<Vec<Option<usize>>> {
    fn go(n: usize, m: usize, cur: &mut Vec<Option<usize>>, out: &mut Vec<Vec<Option<usize>>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for r in 0..n {
            if !cur.contains(&Some(r)) {
                cur.push(Some(r));
                go(n, m, cur, out);
                cur.pop();
            }
        }
        cur.push(None);
        go(n, m, cur, out);
        cur.pop();
    }
    let mut out = Vec::new();
    go(n, m, &mut Vec::with_capacity(m), &mut out);
    out
}

impl ActionCodec for ReducedCodec {
    fn len(&self) -> usize {
        self.actions.len()
    }

    fn mask(&self, env: &Environment) -> Vec<bool> {
        let far_ok: Vec<bool> = env.far().iter().map(|&u| env.has_task(u)).collect();
        let near_ok: Vec<bool> = env.near().iter().map(|&u| env.has_task(u)).collect();
        self.mask_for(&far_ok, &near_ok)
    }

    fn decode(&self, index: usize, env: &Environment) -> Allocation {
        let mut alloc = Allocation::idle(self.n_channels);
        for (m, &(f, r)) in self.actions[index].iter().enumerate() {
            alloc.channels[m].extend(f.map(|k| env.far()[k]));
            alloc.channels[m].extend(r.map(|k| env.near()[k]));
        }
        alloc
    }
}

/// Index map over the unreduced space.
///
/// A channel carries one of the `binom(N + 1, 2)` position pairs, where the
/// extra element `N` means "no UE" (so the pair is a single UE). Actions are
/// ordered arrangements of `M` distinct pairs. Arrangements that put one UE
/// on two channels are masked; eligibility is not, so an empty-queue UE can
/// be scheduled and wastes its grant.
#[derive(Debug, Clone)]
pub struct FullCodec {
    n_channels: usize,
    pairs: Vec<(usize, Option<usize>)>,
    actions: Vec<Vec<u32>>,
    mask: Vec<bool>,
}

impl FullCodec {
    pub fn new(n_ues: usize, n_channels: usize) -> Result<Self> {
        let count = count_full_actions(n_ues, n_channels)?;
        if count > MAX_CODEC_ACTIONS as u128 {
            return Err(Error::ActionSpace(format!(
                "unreduced space has {count} actions, above the {MAX_CODEC_ACTIONS} limit"
            )));
        }
        let mut pairs = Vec::new();
        for i in 0..n_ues {
            for j in i + 1..=n_ues {
                pairs.push((i, (j < n_ues).then_some(j)));
            }
        }
        let mut actions = Vec::with_capacity(count as usize);
        let mut cur = Vec::with_capacity(n_channels);
        fn go(c: usize, m: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if cur.len() == m {
                out.push(cur.clone());
                return;
            }
            for p in 0..c as u32 {
                if !cur.contains(&p) {
                    cur.push(p);
                    go(c, m, cur, out);
                    cur.pop();
                }
            }
        }
        go(pairs.len(), n_channels, &mut cur, &mut actions);
        debug_assert_eq!(actions.len() as u128, count);
        let mask = actions
            .iter()
            .map(|a| {
                let mut used: Vec<usize> = a
                    .iter()
                    .flat_map(|&p| {
                        let (i, j) = pairs[p as usize];
                        std::iter::once(i).chain(j)
                    })
                    .collect();
                let n = used.len();
                used.sort_unstable();
                used.dedup();
                used.len() == n
            })
            .collect();
        Ok(Self {
            n_channels,
            pairs,
            actions,
            mask,
        })
    }

    pub fn for_env(env: &Environment) -> Result<Self> {
        Self::new(env.ues().len(), env.n_channels())
    }

    pub fn structural_mask(&self) -> &[bool] {
        &self.mask
    }
}

impl ActionCodec for FullCodec {
    fn len(&self) -> usize {
        self.actions.len()
    }

    fn mask(&self, _env: &Environment) -> Vec<bool> {
        self.mask.clone()
    }

    fn decode(&self, index: usize, env: &Environment) -> Allocation {
        let order = env.order();
        let mut alloc = Allocation::idle(self.n_channels);
        for (m, &p) in self.actions[index].iter().enumerate() {
            let (i, j) = self.pairs[p as usize];
            alloc.channels[m].push(order[i]);
            alloc.channels[m].extend(j.map(|j| order[j]));
        }
        alloc
    }
}
