//! Deterministic simulation and deep Q-learning for autonomous vessel
//! navigation.
//!
//! The crate is split along the pipeline:
//!
//! - [`dynamics`]: 3-DOF MMG maneuvering model in prime-II non-dimensional
//!   form, integrated with classical RK4.
//! - [`risk`]: closest-point-of-approach geometry and the exponential
//!   collision-risk index used to pick the critical obstacle.
//! - [`env`]: episodes, observations, shaped rewards and termination.
//! - [`agent`]: Q-network, replay buffer, training loop and evaluation.
//! - [`validate`]: maneuver checks used to accept a coefficient set.
//!
//! All quantities are non-dimensional: lengths in ship lengths `L`, speeds
//! in design speed `U`, time in `L/U`. Angles are radians internally.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod agent;
pub mod angle;
pub mod dynamics;
pub mod env;
pub mod risk;
pub mod validate;

pub use agent::{Checkpoint, QNetwork, TrainConfig};
pub use dynamics::{HydroParams, VesselState};
pub use env::{EpisodeSpec, Mode, Observation, Scenario};
pub use risk::CrAssessment;
