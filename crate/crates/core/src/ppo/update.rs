use ndarray::{Array2, Axis};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::config::PpoConfig;
use crate::error::{Error, Result};

use super::adam::Adam;
use super::gae::normalize;
use super::net::{Grads, Mlp};
use super::policy::masked_softmax;

/// One rollout ready for optimization.
#[derive(Debug, Clone)]
pub struct Batch {
    pub obs: Array2<f64>,
    pub actions: Vec<usize>,
    pub masks: Vec<Vec<bool>>,
    pub old_log_probs: Vec<f64>,
    pub advantages: Vec<f64>,
    pub returns: Vec<f64>,
}

impl Batch {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    fn select(&self, idx: &[usize]) -> Batch {
        let pick = |xs: &[f64]| idx.iter().map(|&i| xs[i]).collect();
        Batch {
            obs: self.obs.select(Axis(0), idx),
            actions: idx.iter().map(|&i| self.actions[i]).collect(),
            masks: idx.iter().map(|&i| self.masks[i].clone()).collect(),
            old_log_probs: pick(&self.old_log_probs),
            advantages: pick(&self.advantages),
            returns: pick(&self.returns),
        }
    }
}

/// `min(r A, clip(r, 1 - eps, 1 + eps) A)`.
pub fn clipped_surrogate(ratio: f64, advantage: f64, eps: f64) -> f64 {
    (ratio * advantage).min(ratio.clamp(1.0 - eps, 1.0 + eps) * advantage)
}

/// Mean statistics of the last update.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct UpdateStats {
    pub policy_loss: f64,
    pub value_loss: f64,
    pub entropy: f64,
    pub approx_kl: f64,
    pub clip_fraction: f64,
}

/// Actor loss `-(1/B) sum(surrogate + c2 * entropy)` and its gradient.
#[derive(Debug, Clone)]
pub struct ActorLoss {
    pub loss: f64,
    pub entropy: f64,
    pub approx_kl: f64,
    pub clip_fraction: f64,
    pub grads: Grads,
}

pub fn actor_loss(actor: &Mlp, batch: &Batch, clip_eps: f64, entropy_coef: f64) -> Result<ActorLoss> {
    let b = batch.len() as f64;
    let (logits, cache) = actor.forward_cached(batch.obs.view());
    let mut d_logits = Array2::zeros(logits.raw_dim());
    let (mut loss, mut entropy, mut kl, mut clipped) = (0.0, 0.0, 0.0, 0.0);
    for (i, row) in logits.outer_iter().enumerate() {
        let dist = masked_softmax(row.as_slice().expect("standard layout"), &batch.masks[i])?;
        let a = batch.actions[i];
        let adv = batch.advantages[i];
        let log_p = dist.log_prob(a);
        let ratio = (log_p - batch.old_log_probs[i]).exp();
        let surr = clipped_surrogate(ratio, adv, clip_eps);
        let h = dist.entropy();
        loss -= (surr + entropy_coef * h) / b;
        entropy += h / b;
        kl += (batch.old_log_probs[i] - log_p) / b;
        if (ratio - 1.0).abs() > clip_eps {
            clipped += 1.0 / b;
        }
        let d_surr = if ratio * adv <= ratio.clamp(1.0 - clip_eps, 1.0 + clip_eps) * adv {
            ratio * adv
        } else {
            0.0
        };
        for (j, &p) in dist.probs().iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let one = if j == a { 1.0 } else { 0.0 };
            let d_ent = -p * (dist.log_prob(j) + h);
            d_logits[[i, j]] = -(d_surr * (one - p) + entropy_coef * d_ent) / b;
        }
    }
    if !loss.is_finite() {
        return Err(Error::NonFiniteLoss(format!("actor loss {loss}")));
    }
    Ok(ActorLoss {
        loss,
        entropy,
        approx_kl: kl,
        clip_fraction: clipped,
        grads: actor.backward(&cache, &d_logits),
    })
}

/// Mean squared error to the value targets and its gradient.
pub fn critic_loss(critic: &Mlp, obs: &Array2<f64>, returns: &[f64]) -> Result<(f64, Grads)> {
    let b = returns.len() as f64;
    let (v, cache) = critic.forward_cached(obs.view());
    let mut d_v = Array2::zeros(v.raw_dim());
    let mut loss = 0.0;
    for (i, &r) in returns.iter().enumerate() {
        let e = v[[i, 0]] - r;
        loss += e * e / b;
        d_v[[i, 0]] = 2.0 * e / b;
    }
    if !loss.is_finite() {
        return Err(Error::NonFiniteLoss(format!("critic loss {loss}")));
    }
    Ok((loss, critic.backward(&cache, &d_v)))
}

fn clip(grads: &mut Grads, max_norm: f64) -> Result<()> {
    if !grads.is_finite() {
        return Err(Error::NonFiniteLoss("non-finite gradient".into()));
    }
    let norm = grads.norm();
    if max_norm > 0.0 && norm > max_norm {
        grads.scale(max_norm / norm);
    }
    Ok(())
}

/// `epochs` passes of shuffled minibatch updates over one rollout.
pub fn ppo_update<R: Rng + ?Sized>(
    actor: &mut Mlp,
    critic: &mut Mlp,
    actor_opt: &mut Adam,
    critic_opt: &mut Adam,
    batch: &Batch,
    cfg: &PpoConfig,
    rng: &mut R,
) -> Result<UpdateStats> {
    let mut batch = batch.clone();
    if cfg.normalize_advantages {
        normalize(&mut batch.advantages);
    }
    let mut order: Vec<usize> = (0..batch.len()).collect();
    let mut stats = UpdateStats::default();
    let mut count = 0.0;
    for _ in 0..cfg.epochs {
        order.shuffle(rng);
        for chunk in order.chunks(cfg.minibatch) {
            let mb = batch.select(chunk);
            let mut a = actor_loss(actor, &mb, cfg.clip_eps, cfg.entropy_coef)?;
            clip(&mut a.grads, cfg.max_grad_norm)?;
            actor_opt.step(actor, &a.grads);
            let (v_loss, mut c_grads) = critic_loss(critic, &mb.obs, &mb.returns)?;
            clip(&mut c_grads, cfg.max_grad_norm)?;
            critic_opt.step(critic, &c_grads);
            stats.policy_loss += a.loss;
            stats.value_loss += v_loss;
            stats.entropy += a.entropy;
            stats.approx_kl += a.approx_kl;
            stats.clip_fraction += a.clip_fraction;
            count += 1.0;
        }
    }
    if count > 0.0 {
        stats.policy_loss /= count;
        stats.value_loss /= count;
        stats.entropy /= count;
        stats.approx_kl /= count;
        stats.clip_fraction /= count;
    }
    Ok(stats)
}
