use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::AgentError;
use crate::env::{Mode, SamplerConfig, MAX_STEPS};

/// Training hyperparameters. Keys left out of a config file take the
/// defaults for its `mode`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub mode: Mode,
    /// Sample training episodes with obstacles.
    pub obstacles: bool,
    pub episodes: usize,
    pub max_steps: usize,
    pub hidden: Vec<usize>,
    pub lr0: f64,
    pub decay_steps: f64,
    pub decay_rate: f64,
    pub staircase: bool,
    pub gamma: f64,
    pub batch_size: usize,
    pub buffer_capacity: usize,
    /// Environment steps between gradient updates.
    pub update_every: usize,
    /// Environment steps between soft target updates.
    pub target_update_every: usize,
    pub tau: f64,
    pub seed: u64,
    /// Episodes between periodic checkpoints; 0 keeps only the final one.
    pub checkpoint_every: usize,
}

impl TrainConfig {
    pub fn defaults(mode: Mode) -> Self {
        let (decay_rate, episodes, update_every) = match mode {
            Mode::Static => (0.4, 9000, 10),
            Mode::Dynamic => (0.5, 8000, 5),
        };
        Self {
            mode,
            obstacles: true,
            episodes,
            max_steps: MAX_STEPS,
            hidden: vec![128, 128],
            lr0: 7.5e-4,
            decay_steps: 50_000.0,
            decay_rate,
            staircase: false,
            gamma: 0.97,
            batch_size: 128,
            buffer_capacity: 100_000,
            update_every,
            target_update_every: 1,
            tau: 0.01,
            seed: 0,
            checkpoint_every: 1000,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, AgentError> {
        let bad = |e: serde_json::Error| AgentError::InvalidConfig(e.to_string());
        let given: Value = serde_json::from_str(text).map_err(bad)?;
        let Value::Object(given) = given else {
            return Err(AgentError::InvalidConfig("expected a JSON object".into()));
        };
        let mode: Mode = match given.get("mode") {
            Some(m) => serde_json::from_value(m.clone()).map_err(bad)?,
            None => return Err(AgentError::InvalidConfig("missing field `mode`".into())),
        };
        let mut merged = serde_json::to_value(Self::defaults(mode)).map_err(bad)?;
        let slots = merged.as_object_mut().unwrap();
        for (k, v) in given {
            if !slots.contains_key(&k) {
                return Err(AgentError::InvalidConfig(format!("unknown field `{k}`")));
            }
            slots.insert(k, v);
        }
        let cfg: Self = serde_json::from_value(merged).map_err(bad)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, AgentError> {
        let text = std::fs::read_to_string(path).map_err(|e| AgentError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Self::from_json(&text).map_err(|e| match e {
            AgentError::InvalidConfig(m) => {
                AgentError::InvalidConfig(format!("{}: {m}", path.display()))
            }
            e => e,
        })
    }

    pub fn validate(&self) -> Result<(), AgentError> {
        let fail = |m: &str| Err(AgentError::InvalidConfig(m.into()));
        let positive = [
            self.lr0,
            self.decay_steps,
            self.decay_rate,
            self.gamma,
            self.tau,
        ];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return fail("lr0, decay_steps, decay_rate, gamma and tau must be positive");
        }
        if self.gamma >= 1.0 {
            return fail("gamma must be below 1");
        }
        if self.tau > 1.0 {
            return fail("tau must be at most 1");
        }
        let counts = [
            self.max_steps,
            self.batch_size,
            self.buffer_capacity,
            self.update_every,
            self.target_update_every,
        ];
        if counts.contains(&0) {
            return fail("max_steps, batch_size, buffer_capacity, update_every and target_update_every must be positive");
        }
        if self.hidden.is_empty() || self.hidden.contains(&0) {
            return fail("hidden layers must be non-empty and positive");
        }
        if self.batch_size > self.buffer_capacity {
            return fail("batch_size exceeds buffer_capacity");
        }
        Ok(())
    }

    pub fn widths(&self) -> Vec<usize> {
        let mut w = vec![self.mode.obs_dim()];
        w.extend(&self.hidden);
        w.push(crate::env::N_ACTIONS);
        w
    }

    pub fn sampler(&self) -> SamplerConfig {
        SamplerConfig {
            mode: self.mode,
            obstacles: self.obstacles,
            max_steps: self.max_steps,
        }
    }

    pub fn lr_at(&self, update_step: u64) -> f64 {
        super::lr_at(
            update_step,
            self.lr0,
            self.decay_steps,
            self.decay_rate,
            self.staircase,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_defaults() {
        let s = TrainConfig::defaults(Mode::Static);
        assert_eq!((s.episodes, s.update_every, s.decay_rate), (9000, 10, 0.4));
        assert_eq!(s.widths(), vec![7, 128, 128, 5]);
        assert_eq!(s.lr_at(0), 7.5e-4);
        assert!((s.lr_at(50_000) - 3.0e-4).abs() < 1e-15);
        let d = TrainConfig::defaults(Mode::Dynamic);
        assert_eq!((d.episodes, d.update_every, d.decay_rate), (8000, 5, 0.5));
        assert_eq!(d.widths(), vec![9, 128, 128, 5]);
        s.validate().unwrap();
        d.validate().unwrap();
    }

    #[test]
    fn partial_file_takes_mode_defaults() {
        let cfg = TrainConfig::from_json(r#"{"mode":"dynamic","episodes":50,"seed":4}"#).unwrap();
        assert_eq!(cfg.episodes, 50);
        assert_eq!(cfg.seed, 4);
        assert_eq!(cfg.decay_rate, 0.5);
        let full = serde_json::to_string(&cfg).unwrap();
        assert_eq!(TrainConfig::from_json(&full).unwrap(), cfg);
    }

    #[test]
    fn bad_files_rejected() {
        assert!(TrainConfig::from_json(r#"{"episodes":5}"#).is_err());
        assert!(TrainConfig::from_json(r#"{"mode":"static","gamma":1.0}"#).is_err());
        assert!(TrainConfig::from_json(r#"{"mode":"static","tau":0}"#).is_err());
        assert!(TrainConfig::from_json(r#"{"mode":"static","epsilon":0.1}"#).is_err());
        assert!(TrainConfig::from_json("[1]").is_err());
    }
}
