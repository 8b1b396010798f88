//! The slot-stepped uplink environment shared by every scheduler.
//!
//! One [`Environment`] is one episode. Each call to [`Environment::step`]
//! serves the head-of-line task of every scheduled UE, appends new arrivals,
//! evicts expired tasks and redraws the fading for the next slot. The
//! environment owns its random stream, and the number of draws per slot does
//! not depend on the actions, so every scheme sees the same arrivals and
//! fading for a given seed.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{self, ChannelRealization, Transmitter};
use crate::config::Scenario;
use crate::error::{Error, Result};
use crate::traffic::{self, FailureReason, Intent, TaskQueue, TaskSpec, Verdict};

/// Large-scale group used for NOMA pairing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Group {
    Far,
    Near,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UeState {
    pub id: usize,
    pub position_m: [f64; 2],
    pub distance_m: f64,
    pub pathloss_db: f64,
    pub group: Group,
    pub intent: Intent,
    pub queue: TaskQueue,
}

impl UeState {
    pub fn large_scale_gain(&self) -> f64 {
        channel::pathloss_gain(self.pathloss_db)
    }
}

/// Channel assignment for one slot.
///
/// `channels[m]` lists the UEs decoded on channel `m`. `collided` lists UEs
/// whose transmissions were lost to a collision; only random access produces
/// those. A UE may appear at most once across both.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Allocation {
    pub channels: Vec<Vec<usize>>,
    pub collided: Vec<usize>,
}

impl Allocation {
    pub fn idle(n_channels: usize) -> Self {
        Self {
            channels: vec![Vec::new(); n_channels],
            collided: Vec::new(),
        }
    }

    pub fn from_channels(channels: Vec<Vec<usize>>) -> Self {
        Self {
            channels,
            collided: Vec::new(),
        }
    }

    /// UEs placed on a channel, in channel order.
    pub fn scheduled(&self) -> impl Iterator<Item = usize> + '_ {
        self.channels.iter().flatten().copied()
    }

    pub fn is_idle(&self) -> bool {
        self.collided.is_empty() && self.channels.iter().all(Vec::is_empty)
    }

    pub fn validate(&self, n_ues: usize, n_channels: usize) -> Result<()> {
        if self.channels.len() != n_channels {
            return Err(Error::Allocation(format!(
                "{} channel lists for {n_channels} channels",
                self.channels.len()
            )));
        }
        let mut seen = vec![false; n_ues];
        for (m, ues) in self.channels.iter().enumerate() {
            if ues.len() > 2 {
                return Err(Error::Allocation(format!("{} UEs on channel {m}", ues.len())));
            }
        }
        for ue in self.scheduled().chain(self.collided.iter().copied()) {
            match seen.get_mut(ue) {
                None => return Err(Error::Allocation(format!("unknown UE id {ue}"))),
                Some(true) => return Err(Error::Allocation(format!("UE {ue} used twice"))),
                Some(s) => *s = true,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutcomeKind {
    Success { bits: u32 },
    Failure(FailureReason),
    /// Scheduled with an empty queue; the grant went unused.
    Idle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UeOutcome {
    pub ue: usize,
    pub channel: Option<usize>,
    pub kind: OutcomeKind,
    /// Achieved rate, when the UE was decoded.
    pub rate_bps: Option<f64>,
}

/// `rho * (successes - everything else)` over the scheduled UEs.
pub fn reward(outcomes: &[UeOutcome], rho: f64) -> f64 {
    outcomes
        .iter()
        .map(|o| match o.kind {
            OutcomeKind::Success { .. } => rho,
            _ => -rho,
        })
        .sum()
}

/// Per-episode counters. Task fates are counted once per task; attempt
/// counters count transmissions.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EpisodeLog {
    pub slots: u32,
    pub arrivals: u64,
    pub dropped: u64,
    pub successes: u64,
    pub success_bits: u64,
    /// Expired after a failed attempt, by the reason of the last attempt.
    pub expired_outage: u64,
    pub expired_deadline: u64,
    pub expired_collision: u64,
    /// Expired without ever being attempted.
    pub expired_unserved: u64,
    pub residual: u64,
    pub transmissions: u64,
    pub collisions: u64,
    pub outage_attempts: u64,
    pub deadline_attempts: u64,
    pub idle_grants: u64,
    pub reward_sum: f64,
    pub per_ue_attempts: Vec<u64>,
    pub per_ue_outages: Vec<u64>,
}

impl EpisodeLog {
    pub fn new(n_ues: usize) -> Self {
        Self {
            per_ue_attempts: vec![0; n_ues],
            per_ue_outages: vec![0; n_ues],
            ..Default::default()
        }
    }

    pub fn expired(&self) -> u64 {
        self.expired_outage + self.expired_deadline + self.expired_collision + self.expired_unserved
    }

    /// Tasks that left the system without being served.
    pub fn failed(&self) -> u64 {
        self.expired() + self.dropped
    }

    pub fn is_conserved(&self) -> bool {
        self.successes + self.failed() + self.residual == self.arrivals
    }

    /// Observed outage fraction for one UE, comparable to its intent's epsilon.
    pub fn outage_fraction(&self, ue: usize) -> Option<f64> {
        let attempts = self.per_ue_attempts[ue];
        (attempts > 0).then(|| self.per_ue_outages[ue] as f64 / attempts as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub outcomes: Vec<UeOutcome>,
    pub reward: f64,
    pub done: bool,
}

/// Flattened state fed to learners: the newest `history` frames, newest first.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub data: Vec<f64>,
}

/// Per-UE queue features in each observation frame.
pub const QUEUE_FEATURES: usize = 4;

/// Length of a flattened observation.
pub fn observation_len(n_ues: usize, n_channels: usize, history: usize) -> usize {
    history * (n_ues * QUEUE_FEATURES + n_ues * n_channels)
}

#[derive(Debug, Clone)]
pub struct Environment {
    scenario: Scenario,
    ues: Vec<UeState>,
    far: Vec<usize>,
    near: Vec<usize>,
    /// Far group then near group, each by ascending id. Observation and
    /// action-codec positions follow this order.
    order: Vec<usize>,
    channel: ChannelRealization,
    noise_power_w: f64,
    slot: u32,
    rng: ChaCha8Rng,
    history: VecDeque<Vec<f64>>,
    log: EpisodeLog,
}

impl Environment {
    /// Places the UEs, draws intents, assigns groups and draws the first
    /// fading block. Queues start empty at slot 0.
    pub fn init_episode(scenario: &Scenario, seed: u64) -> Result<Self> {
        scenario.validate()?;
        let sys = &scenario.system;
        if sys.n_ues < 2 {
            return Err(Error::Config("NOMA pairing needs at least 2 UEs".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let centre = sys.area_side_m / 2.0;
        let intents = &scenario.intents;
        let mut ues = Vec::with_capacity(sys.n_ues);
        for id in 0..sys.n_ues {
            let position_m = [
                rng.random_range(0.0..=sys.area_side_m),
                rng.random_range(0.0..=sys.area_side_m),
            ];
            let distance_m = (position_m[0] - centre)
                .hypot(position_m[1] - centre)
                .max(sys.min_distance_m);
            let pathloss_db = channel::pathloss_db_with(&scenario.channel, distance_m / 1e3)?;
            let pick = |rng: &mut ChaCha8Rng, xs: &[f64]| xs[rng.random_range(0..xs.len())];
            let intent = Intent {
                deadline_s: pick(&mut rng, &intents.deadline_caps_ms) * 1e-3,
                rate_threshold_bps: pick(&mut rng, &intents.rate_thresholds_bps),
                reliability_eps: pick(&mut rng, &intents.reliability_eps),
            };
            ues.push(UeState {
                id,
                position_m,
                distance_m,
                pathloss_db,
                group: Group::Near,
                intent,
                queue: TaskQueue::new(sys.queue_capacity),
            });
        }

        let pathloss: Vec<f64> = ues.iter().map(|u| u.pathloss_db).collect();
        let (far, near) = split_groups(&pathloss);
        for &id in &far {
            ues[id].group = Group::Far;
        }
        let order = far.iter().chain(near.iter()).copied().collect();

        let noise_power_w = channel::noise_power_w(sys.noise_psd_dbm_hz, sys.bandwidth_per_channel_hz);
        let betas: Vec<f64> = ues.iter().map(UeState::large_scale_gain).collect();
        let channel = channel::sample_fading(
            &betas,
            sys.n_channels,
            scenario.channel.rayleigh,
            noise_power_w,
            &mut rng,
        );

        let mut env = Self {
            scenario: scenario.clone(),
            log: EpisodeLog::new(sys.n_ues),
            ues,
            far,
            near,
            order,
            channel,
            noise_power_w,
            slot: 0,
            rng,
            history: VecDeque::with_capacity(sys.obs_history),
        };
        env.push_frame();
        Ok(env)
    }

    pub fn step(&mut self, alloc: &Allocation) -> Result<StepResult> {
        if self.is_done() {
            return Err(Error::EpisodeFinished(self.slot));
        }
        let sys = &self.scenario.system;
        alloc.validate(sys.n_ues, sys.n_channels)?;

        let mut outcomes = Vec::new();
        for &ue in &alloc.collided {
            if let Some(task) = self.ues[ue].queue.head_mut() {
                task.last_failure = Some(FailureReason::Collision);
                self.log.transmissions += 1;
                self.log.collisions += 1;
                outcomes.push(UeOutcome {
                    ue,
                    channel: None,
                    kind: OutcomeKind::Failure(FailureReason::Collision),
                    rate_bps: None,
                });
            }
        }

        let active: Vec<Vec<usize>> = alloc
            .channels
            .iter()
            .map(|ues| ues.iter().copied().filter(|&u| !self.ues[u].queue.is_empty()).collect())
            .collect();
        let served: usize = active.iter().map(Vec::len).sum();

        for (m, ues) in alloc.channels.iter().enumerate() {
            for &ue in ues.iter().filter(|&&u| self.ues[u].queue.is_empty()) {
                self.log.idle_grants += 1;
                outcomes.push(UeOutcome { ue, channel: Some(m), kind: OutcomeKind::Idle, rate_bps: None });
            }
        }

        if served > 0 {
            let f_share = traffic::compute_split(served, sys.bs_compute_hz)?;
            for (m, ues) in active.iter().enumerate() {
                if ues.is_empty() {
                    continue;
                }
                let txs: Vec<Transmitter> = ues
                    .iter()
                    .map(|&ue| Transmitter {
                        ue,
                        gain_sq: self.channel.gain(ue, m),
                        power_w: sys.ue_tx_power_w,
                    })
                    .collect();
                let rates = channel::noma_rates(&txs, self.noise_power_w, sys.bandwidth_per_channel_hz)?;
                for (&ue, rate) in ues.iter().zip(rates) {
                    let slot = self.slot;
                    let slot_s = sys.slot_duration_s;
                    let state = &mut self.ues[ue];
                    let task = *state.queue.head().expect("active UE has a task");
                    let verdict = traffic::judge(&task, rate, f_share, &state.intent, task.remaining_s(slot, slot_s));
                    self.log.transmissions += 1;
                    self.log.per_ue_attempts[ue] += 1;
                    let kind = match verdict {
                        Verdict::Success => {
                            state.queue.pop();
                            self.log.successes += 1;
                            self.log.success_bits += u64::from(task.size_bits);
                            OutcomeKind::Success { bits: task.size_bits }
                        }
                        Verdict::Failure(reason) => {
                            state.queue.head_mut().unwrap().last_failure = Some(reason);
                            match reason {
                                FailureReason::Outage => {
                                    self.log.outage_attempts += 1;
                                    self.log.per_ue_outages[ue] += 1;
                                }
                                FailureReason::DeadlineMiss => self.log.deadline_attempts += 1,
                                FailureReason::Collision => unreachable!("decoded UEs never collide"),
                            }
                            OutcomeKind::Failure(reason)
                        }
                    };
                    outcomes.push(UeOutcome { ue, channel: Some(m), kind, rate_bps: Some(rate) });
                }
            }
        }

        let r = reward(&outcomes, sys.reward_magnitude);
        self.log.reward_sum += r;

        let next_slot = self.slot + 1;
        for ue in 0..self.ues.len() {
            let state = &mut self.ues[ue];
            if let Some(task) = traffic::draw_arrival(
                &self.scenario.traffic,
                &self.scenario.system,
                &state.intent,
                next_slot,
                &mut self.rng,
            ) {
                self.log.arrivals += 1;
                if !state.queue.push(task) {
                    self.log.dropped += 1;
                }
            }
        }

        self.slot = next_slot;
        self.log.slots = next_slot;
        for ue in 0..self.ues.len() {
            for task in self.ues[ue].queue.evict_expired(next_slot) {
                match task.last_failure {
                    None => self.log.expired_unserved += 1,
                    Some(FailureReason::Outage) => self.log.expired_outage += 1,
                    Some(FailureReason::DeadlineMiss) => self.log.expired_deadline += 1,
                    Some(FailureReason::Collision) => self.log.expired_collision += 1,
                }
            }
        }

        let betas: Vec<f64> = self.ues.iter().map(UeState::large_scale_gain).collect();
        self.channel = channel::sample_fading(
            &betas,
            sys.n_channels,
            self.scenario.channel.rayleigh,
            self.noise_power_w,
            &mut self.rng,
        );
        self.push_frame();
        self.log.residual = self.ues.iter().map(|u| u.queue.len() as u64).sum();

        Ok(StepResult {
            outcomes,
            reward: r,
            done: self.is_done(),
        })
    }

    pub fn observation(&self) -> Observation {
        let frame_len = self.frame_len();
        let mut data = Vec::with_capacity(frame_len * self.scenario.system.obs_history);
        for frame in &self.history {
            data.extend_from_slice(frame);
        }
        data.resize(frame_len * self.scenario.system.obs_history, 0.0);
        Observation { data }
    }

    fn frame_len(&self) -> usize {
        observation_len(self.ues.len(), self.scenario.system.n_channels, 1)
    }

    fn push_frame(&mut self) {
        let sys = &self.scenario.system;
        let tr = &self.scenario.traffic;
        let max_deadline = f64::from(sys.ms_to_slots(tr.deadline_ms_max));
        let mut frame = Vec::with_capacity(self.frame_len());
        for &ue in &self.order {
            let q = &self.ues[ue].queue;
            frame.push(q.len() as f64 / sys.queue_capacity as f64);
            match q.head() {
                Some(t) => {
                    frame.push(f64::from(t.size_bits) / f64::from(tr.size_bits_max));
                    frame.push(t.cycles_per_bit / tr.cycles_per_bit_max);
                    frame.push(t.remaining_slots(self.slot) as f64 / max_deadline);
                }
                None => frame.extend([0.0; 3]),
            }
        }
        for &ue in &self.order {
            for m in 0..sys.n_channels {
                frame.push(snr_feature(self.channel.gain(ue, m) * sys.ue_tx_power_w / self.noise_power_w));
            }
        }
        if self.history.len() == sys.obs_history {
            self.history.pop_back();
        }
        self.history.push_front(frame);
    }

    pub fn is_done(&self) -> bool {
        self.slot >= self.scenario.system.episode_len_slots
    }

    pub fn slot(&self) -> u32 {
        self.slot
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn ues(&self) -> &[UeState] {
        &self.ues
    }

    pub fn far(&self) -> &[usize] {
        &self.far
    }

    pub fn near(&self) -> &[usize] {
        &self.near
    }

    /// UE ids in observation order (far group, then near group).
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn channel(&self) -> &ChannelRealization {
        &self.channel
    }

    pub fn noise_power_w(&self) -> f64 {
        self.noise_power_w
    }

    pub fn n_channels(&self) -> usize {
        self.scenario.system.n_channels
    }

    pub fn has_task(&self, ue: usize) -> bool {
        !self.ues[ue].queue.is_empty()
    }

    pub fn head(&self, ue: usize) -> Option<&TaskSpec> {
        self.ues[ue].queue.head()
    }

    pub fn log(&self) -> &EpisodeLog {
        &self.log
    }

    pub fn into_log(self) -> EpisodeLog {
        self.log
    }
}

/// Far = the `n / 2` UEs with the largest path loss; ties go to the lower id.
pub fn split_groups(pathloss_db: &[f64]) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..pathloss_db.len()).collect();
    idx.sort_by(|&a, &b| pathloss_db[b].total_cmp(&pathloss_db[a]).then(a.cmp(&b)));
    let n_far = pathloss_db.len() / 2;
    let mut far = idx[..n_far].to_vec();
    let mut near = idx[n_far..].to_vec();
    far.sort_unstable();
    near.sort_unstable();
    (far, near)
}

/// Received SNR in dB, scaled to roughly unit range for the networks.
fn snr_feature(snr: f64) -> f64 {
    (10.0 * snr.max(1e-6).log10()) / 100.0
}
