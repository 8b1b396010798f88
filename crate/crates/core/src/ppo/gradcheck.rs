//! Central-difference check of analytic gradients.

use rand::seq::index::sample;
use rand::Rng;

use super::net::{Grads, Mlp};

/// Default finite-difference step.
pub const STEP: f64 = 1e-5;

/// Largest relative error between `analytic` and central differences of
/// `loss` over `samples` randomly chosen parameters (all of them if there
/// are fewer).
///
/// The relative error is `|a - n| / max(|a|, |n|, floor)`; the floor keeps
/// parameters with vanishing gradient from dividing rounding noise by zero.
pub fn max_relative_error<R: Rng + ?Sized>(
    net: &Mlp,
    analytic: &Grads,
    loss: impl Fn(&Mlp) -> f64,
    samples: usize,
    floor: f64,
    rng: &mut R,
) -> f64 {
    let flat = analytic.flat();
    let n = net.param_count();
    assert_eq!(flat.len(), n, "gradient layout does not match the network");
    let picks: Vec<usize> = if samples >= n {
        (0..n).collect()
    } else {
        sample(rng, n, samples).into_vec()
    };
    let mut probe = net.clone();
    let mut worst: f64 = 0.0;
    for k in picks {
        let orig = *probe.param_mut(k);
        *probe.param_mut(k) = orig + STEP;
        let up = loss(&probe);
        *probe.param_mut(k) = orig - STEP;
        let down = loss(&probe);
        *probe.param_mut(k) = orig;
        let numeric = (up - down) / (2.0 * STEP);
        let a = flat[k];
        let err = (a - numeric).abs() / a.abs().max(numeric.abs()).max(floor);
        worst = worst.max(err);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ppo::net::Architecture;
    use crate::ppo::policy::masked_softmax;
    use crate::ppo::update::{actor_loss, critic_loss, Batch};
    use ndarray::Array2;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn inputs(rows: usize, cols: usize) -> Array2<f64> {
        Array2::from_shape_fn((rows, cols), |(i, j)| ((i * 5 + j * 11) % 7) as f64 / 3.0 - 1.0)
    }

    #[test]
    fn critic_gradients_match() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for arch in [Architecture::SingleLayer { width: 6 }, Architecture::D2rl { width: 5, depth: 4 }] {
            let net = Mlp::new(arch, 4, 1, 1.0, &mut rng);
            let x = inputs(5, 4);
            let ret = [0.5, -1.0, 2.0, 0.0, 1.5];
            let (_, g) = critic_loss(&net, &x, &ret).unwrap();
            let err = max_relative_error(&net, &g, |n| critic_loss(n, &x, &ret).unwrap().0, 10_000, 1e-6, &mut rng);
            assert!(err < 1e-5, "{arch:?}: {err}");
        }
    }

    #[test]
    fn actor_gradients_match() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for arch in [Architecture::SingleLayer { width: 6 }, Architecture::D2rl { width: 5, depth: 4 }] {
            let net = Mlp::new(arch, 4, 5, 1.0, &mut rng);
            let obs = inputs(4, 4);
            let masks: Vec<Vec<bool>> = (0..4).map(|i| (0..5).map(|j| (i + j) % 4 != 1).collect()).collect();
            let logits = net.forward(obs.view());
            let mut actions = Vec::new();
            let mut old = Vec::new();
            for (i, row) in logits.outer_iter().enumerate() {
                let d = masked_softmax(row.as_slice().unwrap(), &masks[i]).unwrap();
                let a = d.argmax();
                actions.push(a);
                // small offsets keep every ratio away from the clip kinks
                old.push(d.log_prob(a) + 0.01 * i as f64);
            }
            let batch = Batch {
                obs,
                actions,
                masks,
                old_log_probs: old,
                advantages: vec![1.0, -2.0, 0.5, 0.25],
                returns: vec![0.0; 4],
            };
            let l = actor_loss(&net, &batch, 0.2, 0.01).unwrap();
            let err = max_relative_error(
                &net,
                &l.grads,
                |n| actor_loss(n, &batch, 0.2, 0.01).unwrap().loss,
                10_000,
                1e-6,
                &mut rng,
            );
            assert!(err < 1e-5, "{arch:?}: {err}");
        }
    }
}
