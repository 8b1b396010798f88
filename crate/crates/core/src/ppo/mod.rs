//! Proximal policy optimization with hand-written networks.
//!
//! The actor outputs one logit per codec action; invalid actions are masked
//! before the softmax. The critic outputs a scalar state value.

pub mod adam;
pub mod agent;
pub mod checkpoint;
pub mod gae;
pub mod gradcheck;
pub mod net;
pub mod policy;
pub mod train;
pub mod update;

pub use adam::Adam;
pub use agent::{Codec, Decision, PpoAgent};
pub use gae::gae;
pub use net::{Architecture, Dense, Grads, Mlp};
pub use policy::{masked_softmax, MaskedCategorical};
pub use train::{evaluate, train, TrainReport};
pub use update::{actor_loss, clipped_surrogate, critic_loss, ppo_update, Batch, UpdateStats};
