//! Hand-written backprop of both network layouts checked against central
//! differences.
//!
//! cargo run --example network_gradients

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use noma_sched::ppo::gradcheck::{max_relative_error, STEP};
use noma_sched::ppo::{Architecture, Mlp};

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for arch in [Architecture::SingleLayer { width: 32 }, Architecture::D2rl { width: 16, depth: 4 }] {
        let net = Mlp::new(arch, 10, 4, 1.0, &mut rng);
        let x = Array2::from_shape_simple_fn((8, 10), || rng.random_range(-1.0..1.0));
        let y = Array2::from_shape_simple_fn((8, 4), || rng.random_range(-1.0..1.0));
        let loss = |n: &Mlp| 0.5 * (n.forward(x.view()) - &y).mapv(|v| v * v).sum();
        let (out, cache) = net.forward_cached(x.view());
        let grads = net.backward(&cache, &(out - &y));
        let err = max_relative_error(&net, &grads, loss, 500, 1e-6, &mut rng);
        println!(
            "{arch:?}: {} parameters, |grad| {:.3}, max relative error {err:.2e} (step {STEP})",
            net.param_count(),
            grads.norm()
        );
    }
}
