//! Task arrivals, FIFO queues, remote execution time and the URLLC test.

use std::collections::VecDeque;

use rand::Rng;

use crate::config::{SystemConfig, TrafficConfig};
use crate::error::{Error, Result};

/// A UE's requested quality of service.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intent {
    /// Upper bound on the deadlines of tasks this UE generates.
    pub deadline_s: f64,
    pub reliability_eps: f64,
    pub rate_threshold_bps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaskSpec {
    pub size_bits: u32,
    pub cycles_per_bit: f64,
    pub deadline_slots: u32,
    pub arrival_slot: u32,
    /// Reason of the most recent failed attempt, if any.
    pub last_failure: Option<FailureReason>,
}

impl TaskSpec {
    pub fn deadline_s(&self, slot_duration_s: f64) -> f64 {
        f64::from(self.deadline_slots) * slot_duration_s
    }

    /// Slots left before expiry when observed at `slot`. Zero or less means expired.
    pub fn remaining_slots(&self, slot: u32) -> i64 {
        i64::from(self.deadline_slots) - (i64::from(slot) - i64::from(self.arrival_slot))
    }

    pub fn remaining_s(&self, slot: u32, slot_duration_s: f64) -> f64 {
        self.remaining_slots(slot) as f64 * slot_duration_s
    }

    pub fn cycles(&self) -> f64 {
        f64::from(self.size_bits) * self.cycles_per_bit
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FailureReason {
    Outage,
    DeadlineMiss,
    Collision,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Success,
    Failure(FailureReason),
}

/// Bounded FIFO of pending tasks. Arrivals beyond capacity are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskQueue {
    capacity: usize,
    tasks: VecDeque<TaskSpec>,
}

impl TaskQueue {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity,
            tasks: VecDeque::with_capacity(capacity.min(64)),
        }
    }

    /// Returns false if the queue was full and the task was dropped.
    pub fn push(&mut self, task: TaskSpec) -> bool {
        if self.tasks.len() >= self.capacity {
            return false;
        }
        self.tasks.push_back(task);
        true
    }

    pub fn head(&self) -> Option<&TaskSpec> {
        self.tasks.front()
    }

    pub fn head_mut(&mut self) -> Option<&mut TaskSpec> {
        self.tasks.front_mut()
    }

    pub fn pop(&mut self) -> Option<TaskSpec> {
        self.tasks.pop_front()
    }

    /// Removes every task whose deadline has passed at `slot`.
    pub fn evict_expired(&mut self, slot: u32) -> Vec<TaskSpec> {
        let mut expired = Vec::new();
        self.tasks.retain(|t| {
            let live = t.remaining_slots(slot) > 0;
            if !live {
                expired.push(*t);
            }
            live
        });
        expired
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn iter(&self) -> impl Iterator<Item = &TaskSpec> {
        self.tasks.iter()
    }
}

/// Draws whether a task arrives this slot and, if so, its parameters.
///
/// Attributes are drawn even when the queue will reject the task, so the
/// random stream never depends on queue state.
pub fn draw_arrival<R: Rng + ?Sized>(
    traffic: &TrafficConfig,
    system: &SystemConfig,
    intent: &Intent,
    arrival_slot: u32,
    rng: &mut R,
) -> Option<TaskSpec> {
    let arrives = rng.random::<f64>() < traffic.arrival_prob;
    let size_bits = rng.random_range(traffic.size_bits_min..=traffic.size_bits_max);
    let cycles_per_bit = if traffic.cycles_per_bit_max > traffic.cycles_per_bit_min {
        rng.random_range(traffic.cycles_per_bit_min..traffic.cycles_per_bit_max)
    } else {
        traffic.cycles_per_bit_min
    };
    let lo = system.ms_to_slots(traffic.deadline_ms_min);
    let hi = system
        .ms_to_slots(intent.deadline_s * 1e3)
        .clamp(lo, system.ms_to_slots(traffic.deadline_ms_max));
    let deadline_slots = rng.random_range(lo..=hi);
    arrives.then_some(TaskSpec {
        size_bits,
        cycles_per_bit,
        deadline_slots,
        arrival_slot,
        last_failure: None,
    })
}

/// Upload plus execution time: `A / R + A * C / f`.
pub fn remote_time(task: &TaskSpec, rate_bps: f64, f_share_hz: f64) -> Result<f64> {
    if !(rate_bps > 0.0) {
        return Err(Error::Unschedulable("zero uplink rate"));
    }
    if !(f_share_hz > 0.0) {
        return Err(Error::Unschedulable("zero compute share"));
    }
    Ok(f64::from(task.size_bits) / rate_bps + task.cycles() / f_share_hz)
}

/// Equal split of the BS CPU across the tasks served in one slot.
pub fn compute_split(n_scheduled: usize, bs_compute_hz: f64) -> Result<f64> {
    if n_scheduled == 0 {
        return Err(Error::Unschedulable("no tasks to split compute across"));
    }
    Ok(bs_compute_hz / n_scheduled as f64)
}

/// URLLC test for one served head-of-line task.
///
/// Outage when `rate <= r_th`; otherwise a deadline miss when the remote time
/// exceeds the remaining deadline (equality succeeds).
pub fn judge(
    task: &TaskSpec,
    rate_bps: f64,
    f_share_hz: f64,
    intent: &Intent,
    remaining_s: f64,
) -> Verdict {
    if rate_bps <= intent.rate_threshold_bps {
        return Verdict::Failure(FailureReason::Outage);
    }
    match remote_time(task, rate_bps, f_share_hz) {
        Ok(t) if t <= remaining_s => Verdict::Success,
        _ => Verdict::Failure(FailureReason::DeadlineMiss),
    }
}
