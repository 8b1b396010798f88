//! Size of the unreduced action space against the far/near hypergraph
//! reduction, then one greedy weighted matching.
//!
//! cargo run --example hypergraph_reduction

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use noma_sched::action_space::{
    build_hypergraph, count_full_actions, enumerate_reduced_actions, greedy_matching, permutations,
};

fn main() -> noma_sched::Result<()> {
    println!("{:>4} {:>3} {:>22} {:>14}", "N", "M", "unreduced", "reduced");
    for (n, m) in [(4, 2), (6, 2), (8, 2), (30, 3)] {
        let half = (n / 2) as u128;
        let reduced = permutations(half, m as u128).unwrap() * permutations(n as u128 - half, m as u128).unwrap();
        println!("{n:>4} {m:>3} {:>22} {reduced:>14}", count_full_actions(n, m)?);
    }

    // far = {1, 2}, near = {3, 4}, two channels
    let mut h = build_hypergraph(&[1, 2], &[3, 4], 2, |_| true);
    println!("\n{} hyperedges, matchings covering both channels:", h.edges.len());
    for a in enumerate_reduced_actions(&h, 2) {
        let parts: Vec<String> = a
            .edges
            .iter()
            .map(|e| format!("{{{}, {}, ch{}}}", e.far.unwrap(), e.near.unwrap(), e.channel))
            .collect();
        println!("  {}", parts.join(" "));
    }

    for (i, e) in h.edges.iter_mut().enumerate() {
        e.weight = [2.0, 1.0, 1.0, 0.5, 0.0, 2.0, 1.5, 1.0][i];
    }
    let m = greedy_matching(&h, &mut ChaCha8Rng::seed_from_u64(0));
    println!("\ngreedy picks weight {}: {:?}", m.weight(), m.to_allocation(2).channels);
    Ok(())
}
