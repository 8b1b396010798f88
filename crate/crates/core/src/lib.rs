//! Uplink NOMA scheduling for IIoT computation offloading.
//!
//! The crate models a single base station serving `N` UEs over `M`
//! orthogonal channels, with at most two UEs sharing a channel through
//! successive interference cancellation. Each UE offloads deadline-bound
//! computation tasks; a task succeeds when its uplink rate clears the UE's
//! outage threshold and upload plus execution finishes before the deadline.
//!
//! Modules, bottom up:
//!
//! - [`channel`]: path loss, Rayleigh block fading, NOMA rates
//! - [`traffic`]: arrivals, queues, remote execution time, success test
//! - [`env`]: the slot-stepped environment and its episode log
//! - [`action_space`]: action counting, the far/near hypergraph, matchings
//!   and the greedy matching heuristic
//! - [`schedulers`]: the baseline policies
//! - [`ppo`]: dense networks, masked categorical policy, GAE and PPO
//! - [`harness`]: metrics, campaigns and CSV output
//!
//! See the `examples/` directory for one runnable program per capability.

// `!(x > 0.0)` is used on purpose so NaN lands on the rejecting side.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod action_space;
pub mod channel;
pub mod config;
pub mod env;
pub mod error;
pub mod harness;
pub mod ppo;
pub mod schedulers;
pub mod seed;
pub mod traffic;

pub use config::{Config, Scenario};
pub use env::{Allocation, Environment};
pub use error::{Error, Result};
