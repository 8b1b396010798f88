//! The pieces of the PPO objective on hand-sized inputs.
//!
//! cargo run --example gae_and_clip

use noma_sched::ppo::{clipped_surrogate, gae, masked_softmax};

fn main() -> noma_sched::Result<()> {
    let rewards = [1.0, 1.0, -1.0, 2.0];
    let values = [0.5, 0.4, 0.3, 0.6, 0.0];
    let (adv, ret) = gae(&rewards, &values, 0.99, 0.95)?;
    println!("advantages {adv:.4?}");
    println!("returns    {ret:.4?}");

    for (ratio, a) in [(1.5, 1.0), (0.5, -1.0), (1.1, 2.0), (0.7, 1.0)] {
        println!("ratio {ratio:.1} advantage {a:+.1} -> surrogate {:+.2}", clipped_surrogate(ratio, a, 0.2));
    }

    let d = masked_softmax(&[1.0, 0.0, 3.0], &[true, true, false])?;
    println!("masked probabilities {:.4?}, entropy {:.4}", d.probs(), d.entropy());
    Ok(())
}
