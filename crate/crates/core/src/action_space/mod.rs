//! Action spaces for the channel-allocation problem.
//!
//! The unreduced space assigns an unordered UE pair (or a single UE) to every
//! channel. The reduced space splits UEs into a far and a near group, builds
//! a 3-uniform hypergraph whose edges are `{far UE, near UE, channel}` and
//! takes the actions to be the matchings that cover every channel.

mod codec;
mod combinatorics;
mod greedy;
mod hypergraph;

pub use codec::{ActionCodec, FullCodec, ReducedCodec, MAX_CODEC_ACTIONS};
pub use combinatorics::{binomial, count_full_actions, permutations};
pub use greedy::greedy_matching;
pub use hypergraph::{build_hypergraph, enumerate_reduced_actions, Hyperedge, Hypergraph, Matching};
