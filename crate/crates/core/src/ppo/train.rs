use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::action_space::ActionCodec;
use crate::config::Config;
use crate::env::{EpisodeLog, Environment};
use crate::error::{Error, Result};
use crate::harness::{compute_metrics, run_episodes, Metrics, MetricsRow};
use crate::schedulers::Scheduler;
use crate::seed;

use super::adam::Adam;
use super::agent::{Decision, PpoAgent};
use super::gae::gae;
use super::update::{ppo_update, Batch, UpdateStats};

/// Result of a training run.
#[derive(Debug, Clone)]
pub struct TrainReport {
    pub agent: PpoAgent,
    /// One row per evaluation window, taken before the window's first
    /// training episode.
    pub rows: Vec<MetricsRow>,
    pub training_logs: Vec<EpisodeLog>,
    pub updates: usize,
    pub last_update: Option<UpdateStats>,
    /// Actor learning rate the run finished with.
    pub actor_lr: f64,
    /// Whether the run was restarted at the fallback learning rate.
    pub fell_back: bool,
}

#[derive(Default)]
struct Rollout {
    steps: Vec<Decision>,
    values: Vec<f64>,
    rewards: Vec<f64>,
    dones: Vec<bool>,
}

impl Rollout {
    fn len(&self) -> usize {
        self.steps.len()
    }

    /// Drains into a batch; `bootstrap` is the value after the last step
    /// when it did not end an episode.
    fn take(&mut self, bootstrap: f64, gamma: f64, lambda: f64) -> Result<Batch> {
        let n = self.len();
        let mut advantages = Vec::with_capacity(n);
        let mut returns = Vec::with_capacity(n);
        let mut start = 0;
        for end in 1..=n {
            if end < n && !self.dones[end - 1] {
                continue;
            }
            let tail = if self.dones[end - 1] { 0.0 } else { bootstrap };
            let mut values = self.values[start..end].to_vec();
            values.push(tail);
            let (a, r) = gae(&self.rewards[start..end], &values, gamma, lambda)?;
            advantages.extend(a);
            returns.extend(r);
            start = end;
        }
        let dim = self.steps.first().map_or(0, |d| d.obs.len());
        let mut obs = Array2::zeros((n, dim));
        for (mut row, d) in obs.outer_iter_mut().zip(&self.steps) {
            row.assign(&ndarray::ArrayView1::from(&d.obs));
        }
        let steps = std::mem::take(&mut self.steps);
        self.values.clear();
        self.rewards.clear();
        self.dones.clear();
        Ok(Batch {
            obs,
            actions: steps.iter().map(|d| d.action).collect(),
            old_log_probs: steps.iter().map(|d| d.log_prob).collect(),
            masks: steps.into_iter().map(|d| d.mask).collect(),
            advantages,
            returns,
        })
    }
}

/// Divides rewards by the running standard deviation of the discounted
/// return, so value targets stay near unit scale whatever the reward
/// magnitude and episode length.
#[derive(Debug, Clone, Default)]
pub struct RewardScaler {
    ret: f64,
    count: f64,
    mean: f64,
    m2: f64,
}

impl RewardScaler {
    pub fn scale(&mut self, reward: f64, gamma: f64, done: bool) -> f64 {
        self.ret = gamma * self.ret + reward;
        self.count += 1.0;
        let d = self.ret - self.mean;
        self.mean += d / self.count;
        self.m2 += d * (self.ret - self.mean);
        if done {
            self.ret = 0.0;
        }
        let std = if self.count > 1.0 { (self.m2 / self.count).sqrt() } else { 0.0 };
        if std > 1e-8 {
            reward / std
        } else {
            reward
        }
    }
}

/// Greedy evaluation on the fixed evaluation seeds of `seed`.
pub fn evaluate(cfg: &Config, agent: &PpoAgent, seed: u64) -> Result<Metrics> {
    let seeds: Vec<u64> = (0..cfg.ppo.eval_episodes as u64)
        .map(|k| seed::derive(seed, seed::EVAL_ENV, k))
        .collect();
    let mut greedy = agent.clone();
    greedy.explore = false;
    let logs = run_episodes(&cfg.scenario(), &seeds, &mut greedy, seed::derive(seed, seed::SCHEDULER, 0))?;
    let per: Vec<Metrics> = logs
        .iter()
        .map(|l| compute_metrics(l, cfg.system.slot_duration_s))
        .collect();
    Ok(Metrics::mean(&per))
}

/// Trains a fresh agent for `episodes` episodes.
///
/// If the configured actor learning rate yields a non-finite loss the run is
/// restarted from scratch at `fallback_actor_lr`, and the report says so.
pub fn train(cfg: &Config, reduced: bool, seed: u64, episodes: usize) -> Result<TrainReport> {
    match train_at(cfg, reduced, seed, episodes, cfg.ppo.actor_lr) {
        Err(Error::NonFiniteLoss(msg)) if cfg.ppo.fallback_actor_lr != cfg.ppo.actor_lr => {
            log::warn!(
                "seed {seed}: {msg} at actor lr {}, restarting at {}",
                cfg.ppo.actor_lr,
                cfg.ppo.fallback_actor_lr
            );
            let mut report = train_at(cfg, reduced, seed, episodes, cfg.ppo.fallback_actor_lr)?;
            report.fell_back = true;
            Ok(report)
        }
        other => other,
    }
}

fn train_at(cfg: &Config, reduced: bool, seed: u64, episodes: usize, actor_lr: f64) -> Result<TrainReport> {
    cfg.validate()?;
    let p = &cfg.ppo;
    let scenario = cfg.scenario();
    let mut agent = PpoAgent::new(cfg, reduced, seed)?;
    let mut actor_opt = Adam::new(agent.actor(), actor_lr, p.optimizer_eps);
    let mut critic_opt = Adam::new(agent.critic(), p.critic_lr, p.optimizer_eps);
    let mut rollout_rng = ChaCha8Rng::seed_from_u64(seed::derive(seed, seed::ROLLOUT, 0));
    let mut update_rng = ChaCha8Rng::seed_from_u64(seed::derive(seed, seed::UPDATE, 0));
    let mut rows = Vec::new();
    let mut training_logs = Vec::with_capacity(episodes);
    let mut rollout = Rollout::default();
    let mut scaler = RewardScaler::default();
    let mut updates = 0;
    let mut last_update = None;

    for e in 0..episodes {
        if e % p.eval_every == 0 {
            let m = evaluate(cfg, &agent, seed)?;
            log::debug!("{} seed {seed} episode {e}: success {:.3}", agent.name(), m.success_norm);
            rows.push(m.row(agent.name(), seed, e));
        }
        agent.explore = true;
        let mut env = Environment::init_episode(&scenario, seed::derive(seed, seed::ENV, e as u64))?;
        while !env.is_done() {
            let d = agent.act(&env, &mut rollout_rng)?;
            let value = agent.value(&d.obs);
            let alloc = agent.codec().decode(d.action, &env);
            let step = env.step(&alloc)?;
            rollout.steps.push(d);
            rollout.values.push(value);
            rollout.rewards.push(if p.scale_rewards {
                scaler.scale(step.reward, p.gamma, step.done)
            } else {
                step.reward
            });
            rollout.dones.push(step.done);
            if rollout.len() == p.rollout_len {
                let bootstrap = if step.done { 0.0 } else { agent.value(&agent.features(&env)) };
                let batch = rollout.take(bootstrap, p.gamma, p.gae_lambda)?;
                let (actor, critic) = agent.nets_mut();
                let stats = ppo_update(actor, critic, &mut actor_opt, &mut critic_opt, &batch, p, &mut update_rng)?;
                updates += 1;
                last_update = Some(stats);
            }
        }
        training_logs.push(env.into_log());
    }
    agent.explore = false;
    Ok(TrainReport {
        agent,
        rows,
        training_logs,
        updates,
        last_update,
        actor_lr,
        fell_back: false,
    })
}
