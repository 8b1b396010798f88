use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::Scenario;
use crate::env::{EpisodeLog, Environment};
use crate::error::Result;
use crate::schedulers::Scheduler;

/// Runs one full episode of `scheduler` on a fresh environment.
pub fn run_episode(
    scenario: &Scenario,
    env_seed: u64,
    scheduler: &mut dyn Scheduler,
    rng: &mut ChaCha8Rng,
) -> Result<EpisodeLog> {
    let mut env = Environment::init_episode(scenario, env_seed)?;
    scheduler.reset(&env);
    while !env.is_done() {
        let alloc = scheduler.decide(&env, rng)?;
        let step = env.step(&alloc)?;
        scheduler.observe(&env, &step.outcomes);
    }
    Ok(env.into_log())
}

/// One episode per environment seed, the scheduler generator seeded with
/// `rng_seed` once for the whole run.
pub fn run_episodes(
    scenario: &Scenario,
    env_seeds: &[u64],
    scheduler: &mut dyn Scheduler,
    rng_seed: u64,
) -> Result<Vec<EpisodeLog>> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    env_seeds
        .iter()
        .map(|&s| run_episode(scenario, s, scheduler, &mut rng))
        .collect()
}
