mod eval;
mod risk;
mod rollout;
mod train;
mod validate;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::Context;
use navsim_core::agent::{Checkpoint, FixedAction, Policy, QNetwork};
use navsim_core::env::EpisodeSpec;
use navsim_core::{HydroParams, Scenario};

pub use eval::eval;
pub use risk::risk;
pub use rollout::rollout;
pub use train::train;
pub use validate::validate;

use crate::error::{CliError, EXIT_MISMATCH};
use crate::PolicyArgs;

fn load_params(path: Option<&Path>) -> Result<HydroParams, CliError> {
    match path {
        Some(p) => HydroParams::from_path(p)
            .with_context(|| format!("loading parameters from {}", p.display()))
            .map_err(CliError::input),
        None => Ok(HydroParams::kcs_like()),
    }
}

fn load_checkpoint(path: &Path) -> Result<Checkpoint, CliError> {
    Checkpoint::load(path)
        .with_context(|| format!("loading checkpoint {}", path.display()))
        .map_err(CliError::input)
}

fn load_scenario(name: &str) -> Result<Scenario, CliError> {
    Scenario::resolve(name)
        .with_context(|| format!("loading scenario {name}"))
        .map_err(CliError::input)
}

fn path_string(p: &Path) -> String {
    p.display().to_string()
}

fn inputs(pairs: &[(&str, Option<&PathBuf>)], scenarios: &[String]) -> BTreeMap<String, String> {
    let mut m: BTreeMap<String, String> = pairs
        .iter()
        .filter_map(|(k, v)| v.map(|p| (k.to_string(), path_string(p))))
        .collect();
    if !scenarios.is_empty() {
        m.insert("scenario".into(), scenarios.join(","));
    }
    m
}

/// File-name-safe version of a scenario name.
fn slug(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

enum LoadedPolicy {
    Fixed(FixedAction),
    Network(Box<QNetwork>),
}

impl LoadedPolicy {
    fn load(args: &PolicyArgs) -> Result<Self, CliError> {
        match &args.checkpoint {
            Some(p) => Ok(Self::Network(Box::new(load_checkpoint(p)?.network))),
            None => {
                let a = args.action.unwrap_or(2);
                if a >= navsim_core::env::N_ACTIONS {
                    return Err(CliError::input(anyhow::anyhow!("action {a} is not in 0-4")));
                }
                Ok(Self::Fixed(FixedAction(a)))
            }
        }
    }

    fn as_policy(&self) -> &dyn Policy {
        match self {
            Self::Fixed(f) => f,
            Self::Network(n) => n.as_ref(),
        }
    }

    fn check(&self, spec: &EpisodeSpec) -> Result<(), CliError> {
        if let Some(d) = self.as_policy().input_dim() {
            if d != spec.mode.obs_dim() {
                return Err(CliError::new(
                    EXIT_MISMATCH,
                    anyhow::anyhow!(
                        "checkpoint expects {d} observation features, scenario mode {:?} gives {}",
                        spec.mode,
                        spec.mode.obs_dim()
                    ),
                ));
            }
        }
        Ok(())
    }
}
