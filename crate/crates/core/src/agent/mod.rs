//! Deep Q-learning: network, optimizer, replay, training and evaluation.

mod adam;
mod checkpoint;
mod config;
mod dqn;
mod eval;
mod network;
mod replay;
mod schedule;
mod train;

use thiserror::Error;

pub use adam::Adam;
pub use checkpoint::{
    Checkpoint, CheckpointHeader, RngState, CHECKPOINT_MAGIC, CHECKPOINT_SCHEMA_VERSION,
};
pub use config::TrainConfig;
pub use dqn::{act, argmax, polyak, td_targets, Learner};
pub use eval::{
    evaluate, run_episode, sampled_cases, EpisodeResult, EvalCase, EvalMetrics, FixedAction,
    Policy, ScenarioMetrics, TrajectoryRow,
};
pub use network::{Dense, QNetwork};
pub use replay::{Batch, ReplayBuffer, Transition};
pub use schedule::{epsilon_at, lr_at};
pub use train::{train, EpisodeRecord, TrainObserver, TrainOutcome, MOVING_AVERAGE_WINDOW};

use crate::env::EnvError;

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("observation has {found} features, network expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("networks have different shapes")]
    ShapeMismatch,
    #[error("invalid layer widths {0}")]
    InvalidShape(String),
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("loss became non-finite at episode {episode}, update {update}")]
    NonFiniteLoss {
        episode: usize,
        update: u64,
        /// Most recent checkpoint taken before the failure, when training.
        last_good: Option<Box<Checkpoint>>,
    },
    #[error("empty batch")]
    EmptyBatch,
    #[error("nothing to evaluate")]
    NoScenarios,
    #[error("bad checkpoint: {0}")]
    Checkpoint(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error("{0}")]
    Observer(String),
}
