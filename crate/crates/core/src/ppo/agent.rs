use ndarray::ArrayView2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::action_space::{ActionCodec, FullCodec, ReducedCodec};
use crate::config::{ArchKind, Config};
use crate::env::{observation_len, Allocation, Environment};
use crate::error::{Error, Result};
use crate::schedulers::Scheduler;
use crate::seed;

use super::net::{Architecture, Mlp};
use super::policy::masked_softmax;

/// Action space of an agent.
#[derive(Debug, Clone)]
pub enum Codec {
    Reduced(ReducedCodec),
    Full(FullCodec),
}

impl Codec {
    /// Codec for `n_ues` UEs split into `n_ues / 2` far and the rest near.
    pub fn new(reduced: bool, n_ues: usize, n_channels: usize) -> Result<Self> {
        Ok(if reduced {
            let far = n_ues / 2;
            Codec::Reduced(ReducedCodec::new(far, n_ues - far, n_channels)?)
        } else {
            Codec::Full(FullCodec::new(n_ues, n_channels)?)
        })
    }

    pub fn is_reduced(&self) -> bool {
        matches!(self, Codec::Reduced(_))
    }
}

impl ActionCodec for Codec {
    fn len(&self) -> usize {
        match self {
            Codec::Reduced(c) => c.len(),
            Codec::Full(c) => c.len(),
        }
    }

    fn mask(&self, env: &Environment) -> Vec<bool> {
        match self {
            Codec::Reduced(c) => c.mask(env),
            Codec::Full(c) => c.mask(env),
        }
    }

    fn decode(&self, index: usize, env: &Environment) -> Allocation {
        match self {
            Codec::Reduced(c) => c.decode(index, env),
            Codec::Full(c) => c.decode(index, env),
        }
    }
}

/// Everything recorded about one policy decision.
#[derive(Debug, Clone)]
pub struct Decision {
    pub obs: Vec<f64>,
    pub mask: Vec<bool>,
    pub action: usize,
    pub log_prob: f64,
}

/// Actor-critic pair acting through a fixed codec.
#[derive(Debug, Clone)]
pub struct PpoAgent {
    actor: Mlp,
    critic: Mlp,
    codec: Codec,
    /// Append the elapsed fraction of the episode to the network input.
    time_feature: bool,
    /// Sample from the policy instead of taking the argmax.
    pub explore: bool,
}

pub fn architecture(kind: ArchKind, width: usize, depth: usize) -> Architecture {
    match kind {
        ArchKind::Single => Architecture::SingleLayer { width },
        ArchKind::D2rl => Architecture::D2rl { width, depth },
    }
}

impl PpoAgent {
    /// Fresh networks for the configured system, initialized from `seed`.
    pub fn new(cfg: &Config, reduced: bool, seed: u64) -> Result<Self> {
        let sys = &cfg.system;
        let codec = Codec::new(reduced, sys.n_ues, sys.n_channels)?;
        let p = &cfg.ppo;
        let obs = observation_len(sys.n_ues, sys.n_channels, sys.obs_history) + usize::from(p.time_feature);
        let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(seed, seed::INIT, 0));
        let actor = Mlp::new(architecture(p.architecture, p.actor_width, p.d2rl_depth), obs, codec.len(), 0.01, &mut rng);
        let critic = Mlp::new(architecture(p.architecture, p.critic_width, p.d2rl_depth), obs, 1, 1.0, &mut rng);
        Ok(Self {
            actor,
            critic,
            codec,
            time_feature: p.time_feature,
            explore: false,
        })
    }

    /// Reassembles an agent; `time_feature` is inferred from the actor's
    /// input width relative to `obs_len`.
    pub fn from_parts(actor: Mlp, critic: Mlp, codec: Codec, obs_len: usize) -> Result<Self> {
        let time_feature = match actor.input_dim().checked_sub(obs_len) {
            Some(0) => false,
            Some(1) => true,
            _ => {
                return Err(Error::LengthMismatch {
                    expected: obs_len,
                    got: actor.input_dim(),
                })
            }
        };
        if actor.output_dim() != codec.len() {
            return Err(Error::LengthMismatch {
                expected: codec.len(),
                got: actor.output_dim(),
            });
        }
        if critic.output_dim() != 1 || critic.input_dim() != actor.input_dim() {
            return Err(Error::Checkpoint("critic shape does not fit the actor".into()));
        }
        Ok(Self {
            actor,
            critic,
            codec,
            time_feature,
            explore: false,
        })
    }

    pub fn actor(&self) -> &Mlp {
        &self.actor
    }

    pub fn critic(&self) -> &Mlp {
        &self.critic
    }

    pub fn nets_mut(&mut self) -> (&mut Mlp, &mut Mlp) {
        (&mut self.actor, &mut self.critic)
    }

    pub fn codec(&self) -> &Codec {
        &self.codec
    }

    pub fn value(&self, input: &[f64]) -> f64 {
        self.critic.forward_one(input)[0]
    }

    /// Network input for the current slot.
    pub fn features(&self, env: &Environment) -> Vec<f64> {
        let mut x = env.observation().data;
        if self.time_feature {
            x.push(f64::from(env.slot()) / f64::from(env.scenario().system.episode_len_slots));
        }
        x
    }

    /// Picks an action for the current slot: sampled with `rng` when
    /// exploring, the argmax otherwise.
    pub fn act(&self, env: &Environment, rng: &mut ChaCha8Rng) -> Result<Decision> {
        let obs = self.features(env);
        if obs.len() != self.actor.input_dim() {
            return Err(Error::LengthMismatch {
                expected: self.actor.input_dim(),
                got: obs.len(),
            });
        }
        let mask = self.codec.mask(env);
        let logits = self
            .actor
            .forward(ArrayView2::from_shape((1, obs.len()), &obs).expect("row vector"));
        let dist = masked_softmax(logits.as_slice().expect("standard layout"), &mask)?;
        let action = if self.explore { dist.sample(rng) } else { dist.argmax() };
        Ok(Decision {
            log_prob: dist.log_prob(action),
            obs,
            mask,
            action,
        })
    }
}

impl Scheduler for PpoAgent {
    fn name(&self) -> &'static str {
        if self.codec.is_reduced() {
            "ppo"
        } else {
            "ppo-full"
        }
    }

    fn decide(&mut self, env: &Environment, rng: &mut ChaCha8Rng) -> Result<Allocation> {
        let d = self.act(env, rng)?;
        Ok(self.codec.decode(d.action, env))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desk() -> Config {
        let mut cfg = Config::default();
        cfg.system.n_ues = 8;
        cfg.system.n_channels = 2;
        cfg.ppo.actor_width = 16;
        cfg.ppo.critic_width = 16;
        cfg
    }

    #[test]
    fn output_sizes_follow_codec() {
        let cfg = desk();
        let a = PpoAgent::new(&cfg, true, 1).unwrap();
        assert_eq!(a.actor().output_dim(), 441);
        assert_eq!(a.actor().input_dim(), 8 * 4 + 8 * 2 + 1);
        let f = PpoAgent::new(&cfg, false, 1).unwrap();
        assert_eq!(f.actor().output_dim(), 1260);
        assert_eq!(f.name(), "ppo-full");
    }

    #[test]
    fn same_seed_same_weights() {
        let cfg = desk();
        let a = PpoAgent::new(&cfg, true, 9).unwrap();
        let b = PpoAgent::new(&cfg, true, 9).unwrap();
        let c = PpoAgent::new(&cfg, true, 10).unwrap();
        assert_eq!(a.actor(), b.actor());
        assert_ne!(a.actor(), c.actor());
    }

    #[test]
    fn decisions_are_valid_allocations() {
        let cfg = desk();
        let mut agent = PpoAgent::new(&cfg, true, 2).unwrap();
        agent.explore = true;
        let mut env = Environment::init_episode(&cfg.scenario(), 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        while !env.is_done() {
            let alloc = agent.decide(&env, &mut rng).unwrap();
            alloc.validate(8, 2).unwrap();
            assert!(alloc.scheduled().all(|u| env.has_task(u)));
            env.step(&alloc).unwrap();
        }
    }
}
