//! Random training episodes.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::reward::SHIP_HALF_LENGTH;
use super::{EpisodeSpec, Mode, Obstacle, MAX_STEPS, SUCCESS_RADIUS};

pub const DYNAMIC_OBSTACLE_COUNT: usize = 4;
const DEST_RANGE: (f64, f64) = (8.0, 18.0);
const ON_SEGMENT_PROBABILITY: f64 = 0.6;
const PLACEMENT_FRACTION: (f64, f64) = (0.25, 0.75);
const STATIC_RADIUS: (f64, f64) = (0.25, 1.0);
const DYNAMIC_RANGE: (f64, f64) = (5.0, 20.0);
const DYNAMIC_MAX_SPEED: f64 = 1.67;
const DYNAMIC_RADIUS: (f64, f64) = (0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerConfig {
    pub mode: Mode,
    /// When false, episodes carry no obstacles (pure path following).
    #[serde(default = "yes")]
    pub obstacles: bool,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
}

fn yes() -> bool {
    true
}

fn default_max_steps() -> usize {
    MAX_STEPS
}

impl SamplerConfig {
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            obstacles: true,
            max_steps: MAX_STEPS,
        }
    }
}

fn uniform(rng: &mut impl Rng, (lo, hi): (f64, f64)) -> f64 {
    rng.gen_range(lo..=hi)
}

fn heading(rng: &mut impl Rng) -> f64 {
    rng.gen_range(-PI..PI)
}

fn base(rng: &mut impl Rng, mode: Mode, max_steps: usize) -> (EpisodeSpec, f64) {
    let seed = rng.gen();
    let dist = uniform(rng, DEST_RANGE);
    let dir = heading(rng);
    let spec = EpisodeSpec {
        mode,
        waypoints: vec![[0.0, 0.0], [dist * dir.cos(), dist * dir.sin()]],
        obstacles: Vec::new(),
        max_steps,
        success_radius: SUCCESS_RADIUS,
        seed,
    };
    (spec, dist)
}

/// One stationary obstacle: 60% of the time on the start-destination
/// segment, otherwise anywhere inside a disk around the start whose radius
/// is a random fraction of the leg length. Disk placements that would
/// already overlap the ship at the start are redrawn.
pub fn sample_static_episode(rng: &mut impl Rng, obstacles: bool, max_steps: usize) -> EpisodeSpec {
    let (mut spec, dist) = base(rng, Mode::Static, max_steps);
    if !obstacles {
        return spec;
    }
    let dest = spec.dest_wp();
    let radius = uniform(rng, STATIC_RADIUS);
    let (x, y) = if rng.gen_bool(ON_SEGMENT_PROBABILITY) {
        let f = uniform(rng, PLACEMENT_FRACTION);
        (f * dest[0], f * dest[1])
    } else {
        let disk = uniform(rng, PLACEMENT_FRACTION) * dist;
        loop {
            let rho = disk * rng.gen::<f64>().sqrt();
            let a = heading(rng);
            if rho > radius + 2.0 * SHIP_HALF_LENGTH {
                break (rho * a.cos(), rho * a.sin());
            }
        }
    };
    spec.obstacles.push(Obstacle {
        id: 0,
        x,
        y,
        vx: 0.0,
        vy: 0.0,
        radius,
    });
    spec
}

/// Four obstacles at 5L-20L from the origin with random speed, course and
/// size.
pub fn sample_dynamic_episode(
    rng: &mut impl Rng,
    obstacles: bool,
    max_steps: usize,
) -> EpisodeSpec {
    let (mut spec, _) = base(rng, Mode::Dynamic, max_steps);
    if !obstacles {
        return spec;
    }
    for id in 0..DYNAMIC_OBSTACLE_COUNT {
        let range = uniform(rng, DYNAMIC_RANGE);
        let bearing = heading(rng);
        let speed = uniform(rng, (0.0, DYNAMIC_MAX_SPEED));
        let course = heading(rng);
        let radius = uniform(rng, DYNAMIC_RADIUS);
        spec.obstacles.push(Obstacle {
            id: id as u32,
            x: range * bearing.cos(),
            y: range * bearing.sin(),
            vx: speed * course.cos(),
            vy: speed * course.sin(),
            radius,
        });
    }
    spec
}

pub fn sample_episode(rng: &mut impl Rng, cfg: &SamplerConfig) -> EpisodeSpec {
    match cfg.mode {
        Mode::Static => sample_static_episode(rng, cfg.obstacles, cfg.max_steps),
        Mode::Dynamic => sample_dynamic_episode(rng, cfg.obstacles, cfg.max_steps),
    }
}
