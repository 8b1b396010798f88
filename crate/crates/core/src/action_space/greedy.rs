use rand::Rng;

use super::hypergraph::{Hypergraph, Matching};

/// Channel-by-channel greedy weighted matching.
///
/// Channels are visited in ascending id. For each channel the heaviest
/// remaining edge on it is taken (uniformly random among exact ties), and
/// every remaining edge intersecting it is discarded.
pub fn greedy_matching<R: Rng + ?Sized>(h: &Hypergraph, rng: &mut R) -> Matching {
    let mut remaining = h.edges.clone();
    let mut matching = Matching::default();
    for channel in 0..h.n_channels {
        let best = remaining
            .iter()
            .filter(|e| e.channel == channel)
            .map(|e| e.weight)
            .fold(f64::NEG_INFINITY, f64::max);
        if best == f64::NEG_INFINITY {
            continue;
        }
        let tied: Vec<usize> = remaining
            .iter()
            .enumerate()
            .filter(|(_, e)| e.channel == channel && e.weight == best)
            .map(|(i, _)| i)
            .collect();
        let pick = if tied.len() == 1 {
            tied[0]
        } else {
            tied[rng.random_range(0..tied.len())]
        };
        let chosen = remaining[pick];
        remaining.retain(|e| !e.intersects(&chosen));
        matching.edges.push(chosen);
    }
    matching
}
