//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use noma_sched::action_space::{Hyperedge, Hypergraph};
use rand::Rng;

/// Exhaustive maximum-weight matching over every subset of edges.
pub fn brute_force_max_matching(h: &Hypergraph) -> f64 {
    let n = h.edges.len();
    assert!(n <= 20, "brute force is exponential");
    let mut best: f64 = 0.0;
    for subset in 0u32..(1 << n) {
        let picked: Vec<&Hyperedge> = (0..n).filter(|i| subset & (1 << i) != 0).map(|i| &h.edges[i]).collect();
        let disjoint = picked
            .iter()
            .enumerate()
            .all(|(i, a)| picked[i + 1..].iter().all(|b| !shares_vertex(a, b)));
        if disjoint {
            best = best.max(picked.iter().map(|e| e.weight).sum());
        }
    }
    best
}

/// Vertex overlap written out from the definition: same channel, or a real
/// UE id in common.
pub fn shares_vertex(a: &Hyperedge, b: &Hyperedge) -> bool {
    let ua: Vec<usize> = [a.far, a.near].into_iter().flatten().collect();
    let ub: Vec<usize> = [b.far, b.near].into_iter().flatten().collect();
    a.channel == b.channel || ua.iter().any(|u| ub.contains(u))
}

/// Random weighted hypergraph with at most `max_edges` distinct edges.
pub fn random_hypergraph<R: Rng>(rng: &mut R, max_edges: usize) -> Hypergraph {
    let m = rng.random_range(1..=3);
    let f = rng.random_range(1..=3);
    let r = rng.random_range(1..=3);
    let mut all = Vec::new();
    for c in 0..m {
        for i in 0..f {
            for j in 0..r {
                all.push(Hyperedge::new(Some(i), Some(f + j), c));
            }
        }
    }
    let k = rng.random_range(1..=max_edges.min(all.len()));
    let mut edges = Vec::with_capacity(k);
    for _ in 0..k {
        let e = all.swap_remove(rng.random_range(0..all.len()));
        edges.push(Hyperedge {
            weight: rng.random_range(0.0..1.0),
            ..e
        });
    }
    Hypergraph::new(edges, m)
}

/// Every per-channel assignment of (far slot, near slot) with distinct real
/// UEs, keeping those that use `min(F, M)` far and `min(R, M)` near UEs.
pub fn brute_force_reduced_count(f: usize, r: usize, m: usize) -> usize {
    let choices_f = f + 1;
    let choices_r = r + 1;
    let per_channel = choices_f * choices_r;
    let total = per_channel.pow(m as u32);
    let mut count = 0;
    for code in 0..total {
        let mut c = code;
        let mut far = Vec::new();
        let mut near = Vec::new();
        for _ in 0..m {
            let slot = c % per_channel;
            c /= per_channel;
            let (a, b) = (slot % choices_f, slot / choices_f);
            if a < f {
                far.push(a);
            }
            if b < r {
                near.push(b);
            }
        }
        let distinct = |v: &Vec<usize>| {
            let mut s = v.clone();
            s.sort_unstable();
            s.dedup();
            s.len() == v.len()
        };
        if distinct(&far) && distinct(&near) && far.len() == f.min(m) && near.len() == r.min(m) {
            count += 1;
        }
    }
    count
}

/// Advantages as the explicit sum `sum_k (gamma lambda)^k delta_{t+k}`.
pub fn gae_double_sum(rewards: &[f64], values: &[f64], gamma: f64, lambda: f64) -> Vec<f64> {
    let t_max = rewards.len();
    let delta: Vec<f64> = (0..t_max).map(|t| rewards[t] + gamma * values[t + 1] - values[t]).collect();
    (0..t_max)
        .map(|t| (t..t_max).map(|k| (gamma * lambda).powi((k - t) as i32) * delta[k]).sum())
        .collect()
}

pub fn desk_config() -> noma_sched::Config {
    let mut cfg = noma_sched::Config::default();
    cfg.system.n_ues = 8;
    cfg.system.n_channels = 2;
    cfg
}
