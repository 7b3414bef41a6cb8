//! Scenario files and the built-in evaluation scenarios.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{EpisodeSpec, Mode, Obstacle, Point, MAX_STEPS, SUCCESS_RADIUS};

pub const SCENARIO_SCHEMA_VERSION: u32 = 1;

pub const BUILTIN_SCENARIOS: [&str; 7] = [
    "fig5a", "fig5b", "fig5c", "fig6a", "fig6b", "fig7", "dyn-demo",
];

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parsing scenario: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported scenario schema version {0}")]
    UnsupportedSchema(u32),
    #[error("unknown scenario `{0}` (not a file or built-in name)")]
    Unknown(String),
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

/// On-disk scenario. Overrides left out of the file take the training
/// defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    pub mode: Mode,
    pub waypoints: Vec<Point>,
    #[serde(default)]
    pub obstacles: Vec<Obstacle>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub success_radius: Option<f64>,
    #[serde(default)]
    pub seed: u64,
}

fn obstacle(id: u32, x: f64, y: f64, radius: f64) -> Obstacle {
    Obstacle {
        id,
        x,
        y,
        vx: 0.0,
        vy: 0.0,
        radius,
    }
}

fn polar(r: f64, deg: f64) -> Point {
    let a = deg.to_radians();
    [r * a.cos(), r * a.sin()]
}

impl Scenario {
    fn new(name: &str, mode: Mode, waypoints: Vec<Point>, obstacles: Vec<Obstacle>) -> Self {
        Self {
            schema_version: SCENARIO_SCHEMA_VERSION,
            name: name.into(),
            mode,
            waypoints,
            obstacles,
            max_steps: None,
            success_radius: None,
            seed: 0,
        }
    }

    /// Built-in scenarios named after the figures they reproduce.
    pub fn builtin(name: &str) -> Option<Self> {
        let s = match name {
            // obstacle halfway along a straight +X leg
            "fig5a" => Self::new(
                name,
                Mode::Static,
                vec![[0.0, 0.0], [15.0, 0.0]],
                vec![obstacle(0, 7.5, 0.0, 0.75)],
            ),
            // leg at 45 deg to the initial heading, obstacle on the line
            "fig5b" => {
                let dest = polar(15.0, 45.0);
                Self::new(
                    name,
                    Mode::Static,
                    vec![[0.0, 0.0], dest],
                    vec![obstacle(0, 0.5 * dest[0], 0.5 * dest[1], 0.75)],
                )
            }
            // leg well behind the starboard beam
            "fig5c" => {
                let dest = polar(12.0, -120.0);
                Self::new(
                    name,
                    Mode::Static,
                    vec![[0.0, 0.0], dest],
                    vec![obstacle(0, 0.55 * dest[0], 0.55 * dest[1], 0.75)],
                )
            }
            // obstacle off the line, near the initial straight run
            "fig6a" => Self::new(
                name,
                Mode::Static,
                vec![[0.0, 0.0], [14.0, 8.0]],
                vec![obstacle(0, 4.0, 0.6, 0.5)],
            ),
            // large obstacle off the line
            "fig6b" => Self::new(
                name,
                Mode::Static,
                vec![[0.0, 0.0], [14.0, -8.0]],
                vec![obstacle(0, 4.5, -1.0, 1.0)],
            ),
            // 15L square, one obstacle halfway along each leg
            "fig7" => {
                let mut s = Self::new(
                    name,
                    Mode::Static,
                    vec![
                        [0.0, 0.0],
                        [15.0, 0.0],
                        [15.0, 15.0],
                        [0.0, 15.0],
                        [0.0, 0.0],
                    ],
                    vec![
                        obstacle(0, 7.5, 0.0, 0.75),
                        obstacle(1, 15.0, 7.5, 0.75),
                        obstacle(2, 7.5, 15.0, 0.75),
                        obstacle(3, 0.0, 7.5, 0.75),
                    ],
                );
                s.max_steps = Some(600);
                s
            }
            "dyn-demo" => Self::new(
                name,
                Mode::Dynamic,
                vec![[0.0, 0.0], [15.0, 0.0]],
                vec![
                    Obstacle {
                        id: 0,
                        x: 8.0,
                        y: -5.0,
                        vx: 0.0,
                        vy: 0.6,
                        radius: 0.5,
                    },
                    Obstacle {
                        id: 1,
                        x: 12.0,
                        y: 4.0,
                        vx: 0.0,
                        vy: -0.5,
                        radius: 0.5,
                    },
                    Obstacle {
                        id: 2,
                        x: 22.0,
                        y: 0.5,
                        vx: -0.8,
                        vy: 0.0,
                        radius: 0.6,
                    },
                    Obstacle {
                        id: 3,
                        x: 5.0,
                        y: 6.0,
                        vx: 0.2,
                        vy: -0.4,
                        radius: 0.3,
                    },
                ],
            ),
            _ => return None,
        };
        Some(s)
    }

    /// Loads a scenario from a file path, falling back to a built-in name.
    pub fn resolve(name_or_path: &str) -> Result<Self, ScenarioError> {
        let path = Path::new(name_or_path);
        if path.exists() {
            return Self::from_path(path);
        }
        Self::builtin(name_or_path).ok_or_else(|| ScenarioError::Unknown(name_or_path.into()))
    }

    pub fn from_path(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let s: Scenario = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.schema_version != SCENARIO_SCHEMA_VERSION {
            return Err(ScenarioError::UnsupportedSchema(self.schema_version));
        }
        if self.waypoints.len() < 2 {
            return Err(ScenarioError::Invalid("need at least two waypoints".into()));
        }
        if self.waypoints.windows(2).any(|w| w[0] == w[1]) {
            return Err(ScenarioError::Invalid(
                "consecutive waypoints coincide".into(),
            ));
        }
        if self
            .waypoints
            .iter()
            .flatten()
            .copied()
            .chain(
                self.obstacles
                    .iter()
                    .flat_map(|o| [o.x, o.y, o.vx, o.vy, o.radius]),
            )
            .any(|v| !v.is_finite())
        {
            return Err(ScenarioError::Invalid("non-finite value".into()));
        }
        if self.obstacles.iter().any(|o| o.radius < 0.0) {
            return Err(ScenarioError::Invalid("negative obstacle radius".into()));
        }
        if self.mode == Mode::Static && self.obstacles.iter().any(|o| o.vx != 0.0 || o.vy != 0.0) {
            return Err(ScenarioError::Invalid(
                "static scenario with moving obstacle".into(),
            ));
        }
        if let Some(r) = self.success_radius {
            if !(r > 0.0) {
                return Err(ScenarioError::Invalid(
                    "success_radius must be positive".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn to_spec(&self) -> EpisodeSpec {
        EpisodeSpec {
            mode: self.mode,
            waypoints: self.waypoints.clone(),
            obstacles: self.obstacles.clone(),
            max_steps: self.max_steps.unwrap_or(MAX_STEPS),
            success_radius: self.success_radius.unwrap_or(SUCCESS_RADIUS),
            seed: self.seed,
        }
    }

    /// Variant `k` of the scenario. Variant 0 is the scenario itself; the
    /// others shift each obstacle by up to ±0.5L per axis and scale its
    /// radius by 0.8-1.2, drawn from `(seed, k)`.
    pub fn variant(&self, k: usize, seed: u64) -> EpisodeSpec {
        let mut spec = self.to_spec();
        if k == 0 {
            return spec;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        spec.seed = seed ^ (k as u64).rotate_left(32);
        for o in &mut spec.obstacles {
            o.x += rng.gen_range(-0.5..=0.5);
            o.y += rng.gen_range(-0.5..=0.5);
            o.radius *= rng.gen_range(0.8..=1.2);
        }
        spec
    }
}
