//! `navsim` command-line front end.

pub mod commands;
pub mod error;
pub mod manifest;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "navsim",
    version,
    about = "Vessel navigation simulator and DQN trainer"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a Q-network on sampled episodes.
    Train(TrainArgs),
    /// Greedy evaluation of a checkpoint on scenarios.
    Eval(EvalArgs),
    /// Single episode with a fixed action or a checkpoint.
    Rollout(RolloutArgs),
    /// Maneuver checks for a hydrodynamic parameter set.
    Validate(ValidateArgs),
    /// Collision-risk table along a rollout.
    Risk(RiskArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Hydrodynamic parameter file (defaults to the shipped KCS-like set).
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Seed; overrides the config file.
    #[arg(long, env = "NAVSIM_SEED")]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "navsim-out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Training config (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Number of training episodes; overrides the config file.
    #[arg(long)]
    pub episodes: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// Scenario file or built-in name; repeatable. `sampled` draws fresh
    /// training-style episodes.
    #[arg(long, required = true, value_delimiter = ',')]
    pub scenario: Vec<String>,
    /// Episodes per scenario: randomized variants (the first is the
    /// scenario as written), or the number of sampled episodes.
    #[arg(long)]
    pub episodes: Option<usize>,
    /// Step cap; overrides the scenario.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Skip per-episode trajectory and plot files.
    #[arg(long)]
    pub metrics_only: bool,
}

#[derive(Debug, Args)]
pub struct PolicyArgs {
    /// Greedy policy from this checkpoint.
    #[arg(long, conflicts_with = "action")]
    pub checkpoint: Option<PathBuf>,
    /// Fixed action index (0-4); defaults to 2, rudder amidships.
    #[arg(long)]
    pub action: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RolloutArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub scenario: String,
    #[command(flatten)]
    pub policy: PolicyArgs,
    /// Step cap; overrides the scenario.
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct RiskArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub scenario: String,
    #[command(flatten)]
    pub policy: PolicyArgs,
    /// Horizon in agent steps; defaults to the scenario step cap.
    #[arg(long)]
    pub steps: Option<usize>,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Train(a) => commands::train(a),
        Command::Eval(a) => commands::eval(a),
        Command::Rollout(a) => commands::rollout(a),
        Command::Validate(a) => commands::validate(a),
        Command::Risk(a) => commands::risk(a),
    }
}
