//! Scenario and experiment configuration.
//!
//! Everything is loaded from one TOML file with the sections `[system]`,
//! `[channel]`, `[traffic]`, `[intents]`, `[schedulers]`, `[ppo]` and
//! `[campaign]`. Every key has a default, so an empty file is a valid
//! configuration. Unknown sections or keys are rejected.
//!
//! | section | key | default | meaning |
//! |---|---|---|---|
//! | system | `n_ues` | 30 | number of IIoT UEs |
//! | system | `n_channels` | 3 | orthogonal uplink channels |
//! | system | `bandwidth_per_channel_hz` | 10e6 | bandwidth of one channel |
//! | system | `slot_duration_s` | 1e-3 | slot (TTI) length |
//! | system | `episode_len_slots` | 25 | slots per episode |
//! | system | `area_side_m` | 100 | side of the square deployment area |
//! | system | `min_distance_m` | 1 | lower clamp on UE to BS distance |
//! | system | `noise_psd_dbm_hz` | -174 | noise power spectral density |
//! | system | `bs_compute_hz` | 120e9 | BS CPU capacity in cycles/s |
//! | system | `queue_capacity` | 50 | per-UE FIFO capacity |
//! | system | `ue_tx_power_w` | 0.08 | fixed UE transmit power |
//! | system | `reward_magnitude` | 1 | per-UE reward magnitude |
//! | system | `obs_history` | 1 | observations stacked into the state |
//! | channel | `pathloss_intercept_db` | 128.1 | path loss at 1 km |
//! | channel | `pathloss_slope_db` | 37.6 | dB per decade of distance |
//! | channel | `rayleigh` | true | unit-mean exponential power fading |
//! | traffic | `arrival_prob` | 0.8 | per-slot task arrival probability |
//! | traffic | `size_bits_min`, `size_bits_max` | 100, 500 | task size |
//! | traffic | `cycles_per_bit_min`, `cycles_per_bit_max` | 100, 2e4 | task complexity |
//! | traffic | `deadline_ms_min`, `deadline_ms_max` | 1, 5 | task deadline range |
//! | intents | `deadline_caps_ms` | [1, 2, 3, 4, 5] | per-UE deadline upper bounds |
//! | intents | `rate_thresholds_bps` | [0.5e6, 1e6, 2e6] | outage thresholds |
//! | intents | `reliability_eps` | [1e-3] | target outage probabilities |
//! | schedulers | `contention_prob` | 0.5 | transmit probability for random access |
//! | schedulers | `semi_static_layout` | "far-near" | pairing used by the static frame |
//! | ppo | see [`PpoConfig`] | | learner hyper-parameters |
//! | campaign | `seeds`, `base_seed`, `schemes`, `jobs` | 8, 1, all, 0 | sweep layout |

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemConfig {
    pub n_ues: usize,
    pub n_channels: usize,
    pub bandwidth_per_channel_hz: f64,
    pub slot_duration_s: f64,
    pub episode_len_slots: u32,
    pub area_side_m: f64,
    pub min_distance_m: f64,
    pub noise_psd_dbm_hz: f64,
    pub bs_compute_hz: f64,
    pub queue_capacity: usize,
    pub ue_tx_power_w: f64,
    pub reward_magnitude: f64,
    pub obs_history: usize,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            n_ues: 30,
            n_channels: 3,
            bandwidth_per_channel_hz: 10e6,
            slot_duration_s: 1e-3,
            episode_len_slots: 25,
            area_side_m: 100.0,
            min_distance_m: 1.0,
            noise_psd_dbm_hz: -174.0,
            bs_compute_hz: 120e9,
            queue_capacity: 50,
            ue_tx_power_w: 0.08,
            reward_magnitude: 1.0,
            obs_history: 1,
        }
    }
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        let err = |m: &str| Err(Error::Config(m.to_string()));
        if self.n_ues == 0 || self.n_channels == 0 || self.queue_capacity == 0 {
            return err("n_ues, n_channels and queue_capacity must be at least 1");
        }
        if self.episode_len_slots == 0 || self.obs_history == 0 {
            return err("episode_len_slots and obs_history must be at least 1");
        }
        if !(self.area_side_m > 0.0) {
            return err("area_side_m must be positive (zero-area region)");
        }
        if !(self.bandwidth_per_channel_hz > 0.0) {
            return err("bandwidth_per_channel_hz must be positive");
        }
        if !(self.ue_tx_power_w > 0.0) || !(self.bs_compute_hz > 0.0) {
            return err("ue_tx_power_w and bs_compute_hz must be positive");
        }
        if !(self.slot_duration_s > 0.0) || !(self.min_distance_m > 0.0) {
            return err("slot_duration_s and min_distance_m must be positive");
        }
        if !self.noise_psd_dbm_hz.is_finite() || !(self.reward_magnitude > 0.0) {
            return err("noise_psd_dbm_hz must be finite and reward_magnitude positive");
        }
        Ok(())
    }

    /// Converts a millisecond deadline into whole slots.
    pub fn ms_to_slots(&self, ms: f64) -> u32 {
        (ms * 1e-3 / self.slot_duration_s).round().max(1.0) as u32
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelConfig {
    pub pathloss_intercept_db: f64,
    pub pathloss_slope_db: f64,
    pub rayleigh: bool,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            pathloss_intercept_db: 128.1,
            pathloss_slope_db: 37.6,
            rayleigh: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrafficConfig {
    pub arrival_prob: f64,
    pub size_bits_min: u32,
    pub size_bits_max: u32,
    pub cycles_per_bit_min: f64,
    pub cycles_per_bit_max: f64,
    pub deadline_ms_min: f64,
    pub deadline_ms_max: f64,
}

impl Default for TrafficConfig {
    fn default() -> Self {
        Self {
            arrival_prob: 0.8,
            size_bits_min: 100,
            size_bits_max: 500,
            cycles_per_bit_min: 1e2,
            cycles_per_bit_max: 2e4,
            deadline_ms_min: 1.0,
            deadline_ms_max: 5.0,
        }
    }
}

impl TrafficConfig {
    pub fn validate(&self) -> Result<()> {
        let err = |m: &str| Err(Error::Config(m.to_string()));
        if !(0.0..=1.0).contains(&self.arrival_prob) {
            return err("arrival_prob must lie in [0, 1]");
        }
        if self.size_bits_min == 0 || self.size_bits_min > self.size_bits_max {
            return err("size range must be non-empty and positive");
        }
        if !(self.cycles_per_bit_min > 0.0) || self.cycles_per_bit_min > self.cycles_per_bit_max {
            return err("cycles_per_bit range must be non-empty and positive");
        }
        if !(self.deadline_ms_min > 0.0) || self.deadline_ms_min > self.deadline_ms_max {
            return err("deadline range must be non-empty and positive");
        }
        Ok(())
    }
}

/// The finite menus a UE picks its intent from at the start of an episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntentSet {
    pub deadline_caps_ms: Vec<f64>,
    pub rate_thresholds_bps: Vec<f64>,
    pub reliability_eps: Vec<f64>,
}

impl Default for IntentSet {
    fn default() -> Self {
        Self {
            deadline_caps_ms: vec![1.0, 2.0, 3.0, 4.0, 5.0],
            rate_thresholds_bps: vec![0.5e6, 1e6, 2e6],
            reliability_eps: vec![1e-3],
        }
    }
}

impl IntentSet {
    pub fn validate(&self, traffic: &TrafficConfig) -> Result<()> {
        let err = |m: &str| Err(Error::Config(m.to_string()));
        if self.deadline_caps_ms.is_empty()
            || self.rate_thresholds_bps.is_empty()
            || self.reliability_eps.is_empty()
        {
            return err("intent sets must be non-empty");
        }
        if self
            .deadline_caps_ms
            .iter()
            .any(|&d| d < traffic.deadline_ms_min || d > traffic.deadline_ms_max)
        {
            return err("deadline caps must lie inside the traffic deadline range");
        }
        if self.rate_thresholds_bps.iter().any(|&r| !(r > 0.0)) {
            return err("rate thresholds must be positive");
        }
        if self.reliability_eps.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
            return err("reliability eps must lie in (0, 1)");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SemiStaticLayout {
    /// i-th far UE paired with the i-th near UE.
    #[default]
    FarNear,
    /// Consecutive UE ids share a channel.
    IdOrder,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchedulerConfig {
    pub contention_prob: f64,
    pub semi_static_layout: SemiStaticLayout,
}

impl Default for SchedulerConfig {
    fn default() -> Self {
        Self {
            contention_prob: 0.5,
            semi_static_layout: SemiStaticLayout::FarNear,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ArchKind {
    #[default]
    Single,
    D2rl,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PpoConfig {
    pub gamma: f64,
    pub gae_lambda: f64,
    pub clip_eps: f64,
    pub entropy_coef: f64,
    pub epochs: usize,
    pub minibatch: usize,
    pub actor_lr: f64,
    pub critic_lr: f64,
    /// Actor learning rate used when a run at `actor_lr` produces a non-finite loss.
    pub fallback_actor_lr: f64,
    pub optimizer_eps: f64,
    /// Global gradient-norm clip per network; 0 disables it.
    pub max_grad_norm: f64,
    pub episodes: usize,
    /// Environment steps collected between updates.
    pub rollout_len: usize,
    pub architecture: ArchKind,
    pub actor_width: usize,
    pub critic_width: usize,
    pub d2rl_depth: usize,
    pub normalize_advantages: bool,
    /// Divide training rewards by the running std of the discounted return.
    pub scale_rewards: bool,
    /// Feed the elapsed fraction of the episode to both networks.
    pub time_feature: bool,
    pub eval_every: usize,
    pub eval_episodes: usize,
}

impl Default for PpoConfig {
    fn default() -> Self {
        Self {
            gamma: 0.99,
            gae_lambda: 0.95,
            clip_eps: 0.2,
            entropy_coef: 0.01,
            epochs: 4,
            minibatch: 32,
            actor_lr: 1e-2,
            critic_lr: 1e-4,
            fallback_actor_lr: 3e-4,
            optimizer_eps: 1e-5,
            max_grad_norm: 0.5,
            episodes: 6000,
            rollout_len: 100,
            architecture: ArchKind::Single,
            actor_width: 256,
            critic_width: 512,
            d2rl_depth: 4,
            normalize_advantages: true,
            scale_rewards: true,
            time_feature: true,
            eval_every: 20,
            eval_episodes: 5,
        }
    }
}

impl PpoConfig {
    pub fn validate(&self) -> Result<()> {
        let err = |m: &str| Err(Error::Config(m.to_string()));
        let unit = |x: f64| x > 0.0 && x <= 1.0;
        if !unit(self.gamma) || !unit(self.gae_lambda) || !(self.clip_eps > 0.0 && self.clip_eps < 1.0) {
            return err("gamma and gae_lambda must lie in (0, 1], clip_eps in (0, 1)");
        }
        if !(self.actor_lr > 0.0 && self.critic_lr > 0.0 && self.fallback_actor_lr > 0.0) {
            return err("learning rates must be positive");
        }
        if !(self.optimizer_eps > 0.0) || self.entropy_coef < 0.0 || self.max_grad_norm < 0.0 {
            return err("optimizer_eps must be positive, entropy_coef and max_grad_norm non-negative");
        }
        if self.epochs == 0 || self.minibatch == 0 || self.rollout_len == 0 {
            return err("epochs, minibatch and rollout_len must be at least 1");
        }
        if self.actor_width == 0 || self.critic_width == 0 || self.d2rl_depth == 0 {
            return err("network widths and depth must be at least 1");
        }
        if self.eval_every == 0 || self.eval_episodes == 0 {
            return err("eval_every and eval_episodes must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    pub seeds: usize,
    pub base_seed: u64,
    /// Scheme names; empty means every scheme.
    pub schemes: Vec<String>,
    /// Worker threads; 0 means one per available core.
    pub jobs: usize,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            seeds: 8,
            base_seed: 1,
            schemes: Vec::new(),
            jobs: 0,
        }
    }
}

/// The parts of the configuration that define the simulated world.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Scenario {
    pub system: SystemConfig,
    pub channel: ChannelConfig,
    pub traffic: TrafficConfig,
    pub intents: IntentSet,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        self.traffic.validate()?;
        self.intents.validate(&self.traffic)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub system: SystemConfig,
    pub channel: ChannelConfig,
    pub traffic: TrafficConfig,
    pub intents: IntentSet,
    pub schedulers: SchedulerConfig,
    pub ppo: PpoConfig,
    pub campaign: CampaignConfig,
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg = Self::from_toml_str(&text).map_err(|source| Error::ConfigParse {
            path: path.to_path_buf(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario().validate()?;
        if !(0.0..=1.0).contains(&self.schedulers.contention_prob) {
            return Err(Error::Config("contention_prob must lie in [0, 1]".into()));
        }
        self.ppo.validate()
    }

    pub fn scenario(&self) -> Scenario {
        Scenario {
            system: self.system.clone(),
            channel: self.channel.clone(),
            traffic: self.traffic.clone(),
            intents: self.intents.clone(),
        }
    }
}
