//! Path-following and collision-avoidance episodes.
//!
//! An [`Env`] owns one episode: the ownship, the obstacles, the active leg
//! of the waypoint list and the running return. Each agent action holds a
//! rudder command for [`SUBSTEPS_PER_ACTION`] RK4 substeps.

mod geometry;
mod reward;
mod sampler;
mod scenario;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angle::wrap;
use crate::dynamics::{
    rk4_step, self_propulsion_rate, DynamicsError, HydroParams, VesselState, DT,
    SUBSTEPS_PER_ACTION,
};
use crate::risk::{assess, critical_obstacle, CrAssessment};

pub use geometry::{course_angle_error, cross_track_error, distance, Point};
pub use reward::{
    reward_step, terminal_check, LegContext, RewardTerms, Status, DYNAMIC_COLLISION_REWARD,
    SHIP_HALF_LENGTH, STATIC_COLLISION_REWARD, SUCCESS_REWARD,
};
pub use sampler::{
    sample_dynamic_episode, sample_episode, sample_static_episode, SamplerConfig,
    DYNAMIC_OBSTACLE_COUNT,
};
pub use scenario::{Scenario, ScenarioError, BUILTIN_SCENARIOS, SCENARIO_SCHEMA_VERSION};

/// Rudder commands (deg) for action indices 0..=4.
pub const ACTIONS_DEG: [f64; 5] = [-35.0, -20.0, 0.0, 20.0, 35.0];
pub const N_ACTIONS: usize = ACTIONS_DEG.len();
pub const MAX_STEPS: usize = 160;
pub const SUCCESS_RADIUS: f64 = 0.5;
/// Observation values used when there is no obstacle to report.
pub const NO_OBSTACLE_RANGE: f64 = 25.0;
/// Non-dim time covered by one agent step.
pub const CONTROL_PERIOD: f64 = DT * SUBSTEPS_PER_ACTION as f64;

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("start and destination waypoints coincide")]
    DegeneratePath,
    #[error("action index {0} out of range 0..{N_ACTIONS}")]
    InvalidAction(usize),
    #[error("episode needs at least two waypoints")]
    TooFewWaypoints,
    #[error("episode already finished")]
    Finished,
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

impl PartialEq for EnvError {
    fn eq(&self, other: &Self) -> bool {
        self.to_string() == other.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Static,
    Dynamic,
}

impl Mode {
    pub fn obs_dim(self) -> usize {
        match self {
            Mode::Static => 7,
            Mode::Dynamic => 9,
        }
    }
}

/// Circular obstacle moving at constant velocity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Obstacle {
    pub id: u32,
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub vx: f64,
    #[serde(default)]
    pub vy: f64,
    pub radius: f64,
}

impl Obstacle {
    pub fn position(&self) -> Point {
        [self.x, self.y]
    }

    pub fn velocity(&self) -> Point {
        [self.vx, self.vy]
    }

    pub fn advanced(&self, dt: f64) -> Self {
        Self {
            x: self.x + self.vx * dt,
            y: self.y + self.vy * dt,
            ..*self
        }
    }
}

/// Everything needed to run one episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeSpec {
    pub mode: Mode,
    /// Ordered waypoints; leg `k` runs from `waypoints[k]` to
    /// `waypoints[k + 1]`.
    pub waypoints: Vec<Point>,
    pub obstacles: Vec<Obstacle>,
    pub max_steps: usize,
    pub success_radius: f64,
    pub seed: u64,
}

impl EpisodeSpec {
    pub fn start_wp(&self) -> Point {
        self.waypoints[0]
    }

    pub fn dest_wp(&self) -> Point {
        *self.waypoints.last().unwrap()
    }

    pub fn legs(&self) -> usize {
        self.waypoints.len().saturating_sub(1)
    }

    fn check(&self) -> Result<(), EnvError> {
        if self.waypoints.len() < 2 {
            return Err(EnvError::TooFewWaypoints);
        }
        if self.waypoints.windows(2).any(|w| w[0] == w[1]) {
            return Err(EnvError::DegeneratePath);
        }
        Ok(())
    }
}

/// State vector fed to the Q-network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub mode: Mode,
    pub d_c: f64,
    pub chi_e: f64,
    pub d_wp: f64,
    pub r: f64,
    pub d_obs: f64,
    pub psi_obs: f64,
    pub s_obs: f64,
    pub v_x: f64,
    pub v_y: f64,
}

impl Observation {
    /// Features in network order: `[d_c, χ_e, d_wp, r, d_obs, ψ_obs, S_obs]`
    /// plus `[v_x, v_y]` in dynamic mode.
    pub fn features(&self) -> Vec<f64> {
        let mut f = vec![
            self.d_c,
            self.chi_e,
            self.d_wp,
            self.r,
            self.d_obs,
            self.psi_obs,
            self.s_obs,
        ];
        if self.mode == Mode::Dynamic {
            f.extend([self.v_x, self.v_y]);
        }
        f
    }

    pub fn dim(&self) -> usize {
        self.mode.obs_dim()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub reward: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub status: Status,
    pub observation: Observation,
    /// Risk record of the critical obstacle, if any.
    pub critical: Option<CrAssessment>,
}

pub fn action_to_rudder(action: usize) -> Result<f64, EnvError> {
    ACTIONS_DEG
        .get(action)
        .map(|d| d.to_radians())
        .ok_or(EnvError::InvalidAction(action))
}

/// Risk records for every obstacle plus the critical one.
pub fn assess_obstacles(
    ship: &VesselState,
    obstacles: &[Obstacle],
) -> (Vec<CrAssessment>, Option<CrAssessment>) {
    let vel = ship.velocity_gcs();
    let all: Vec<_> = obstacles
        .iter()
        .map(|o| assess(o.id, ship.position(), vel, o.position(), o.velocity()))
        .collect();
    let critical = critical_obstacle(&all)
        .ok()
        .and_then(|id| all.iter().find(|a| a.obstacle_id == id).copied());
    (all, critical)
}

/// Builds the observation for the leg `start → dest`.
pub fn observe(
    mode: Mode,
    ship: &VesselState,
    start: Point,
    dest: Point,
    obstacles: &[Obstacle],
) -> Result<(Observation, Option<CrAssessment>), EnvError> {
    let pos = ship.position();
    let vel = ship.velocity_gcs();
    let (_, critical) = assess_obstacles(ship, obstacles);
    let mut obs = Observation {
        mode,
        d_c: cross_track_error(pos, start, dest)?,
        chi_e: course_angle_error(vel, ship.psi, start, dest),
        d_wp: distance(pos, dest),
        r: ship.r,
        d_obs: NO_OBSTACLE_RANGE,
        psi_obs: 0.0,
        s_obs: 0.0,
        v_x: 0.0,
        v_y: 0.0,
    };
    if let Some(c) = &critical {
        let o = obstacles.iter().find(|o| o.id == c.obstacle_id).unwrap();
        let (s, co) = ship.psi.sin_cos();
        let wx = o.vx - vel[0];
        let wy = o.vy - vel[1];
        obs.d_obs = c.range;
        obs.psi_obs = wrap(c.theta - ship.psi);
        obs.s_obs = o.radius;
        obs.v_x = co * wx + s * wy;
        obs.v_y = -s * wx + co * wy;
    }
    Ok((obs, critical))
}

/// One running episode.
#[derive(Debug, Clone)]
pub struct Env {
    params: HydroParams,
    n_sp: f64,
    spec: EpisodeSpec,
    state: VesselState,
    obstacles: Vec<Obstacle>,
    leg: usize,
    steps: usize,
    status: Status,
    episode_return: f64,
}

impl Env {
    /// Calibrates the propeller rate and resets to `spec`.
    pub fn new(params: HydroParams, spec: EpisodeSpec) -> Result<Self, EnvError> {
        let n_sp = self_propulsion_rate(&params)?;
        Self::with_rate(params, n_sp, spec)
    }

    /// Uses an already calibrated propeller rate.
    pub fn with_rate(params: HydroParams, n_sp: f64, spec: EpisodeSpec) -> Result<Self, EnvError> {
        spec.check()?;
        Ok(Self {
            params,
            n_sp,
            state: VesselState::initial(n_sp),
            obstacles: spec.obstacles.clone(),
            spec,
            leg: 0,
            steps: 0,
            status: Status::Running,
            episode_return: 0.0,
        })
    }

    /// Restarts on a new episode and returns the initial observation.
    pub fn reset_with(&mut self, spec: EpisodeSpec) -> Result<Observation, EnvError> {
        spec.check()?;
        self.spec = spec;
        self.reset()
    }

    /// Ship at the origin heading +X at unit surge speed, rudder amidships,
    /// propeller at the self-propulsion rate.
    pub fn reset(&mut self) -> Result<Observation, EnvError> {
        self.state = VesselState::initial(self.n_sp);
        self.obstacles = self.spec.obstacles.clone();
        self.leg = 0;
        self.steps = 0;
        self.status = Status::Running;
        self.episode_return = 0.0;
        Ok(self.observation()?.0)
    }

    fn leg_points(&self) -> (Point, Point) {
        (
            self.spec.waypoints[self.leg],
            self.spec.waypoints[self.leg + 1],
        )
    }

    fn final_leg(&self) -> bool {
        self.leg + 1 == self.spec.legs()
    }

    pub fn observation(&self) -> Result<(Observation, Option<CrAssessment>), EnvError> {
        let (start, dest) = self.leg_points();
        observe(self.spec.mode, &self.state, start, dest, &self.obstacles)
    }

    pub fn step(&mut self, action: usize) -> Result<StepOutcome, EnvError> {
        if self.status.is_terminal() {
            return Err(EnvError::Finished);
        }
        self.state.delta_c = action_to_rudder(action)?;
        for _ in 0..SUBSTEPS_PER_ACTION {
            self.state = rk4_step(&self.state, &self.params, DT)?;
        }
        for o in &mut self.obstacles {
            *o = o.advanced(CONTROL_PERIOD);
        }
        self.steps += 1;

        // intermediate waypoint reached: move on to the next leg
        while !self.final_leg()
            && distance(self.state.position(), self.leg_points().1) <= self.spec.success_radius
        {
            self.leg += 1;
        }

        let (observation, critical) = self.observation()?;
        let terms = reward_step(observation.d_c, observation.chi_e, observation.d_wp);
        let (start, dest) = self.leg_points();
        let ctx = LegContext {
            start,
            dest,
            final_leg: self.final_leg(),
            success_radius: self.spec.success_radius,
            mode: self.spec.mode,
            max_steps: self.spec.max_steps,
        };
        let (status, bonus) = terminal_check(&self.state, &self.obstacles, &ctx, self.steps);
        let reward = terms.total + bonus;
        self.status = status;
        self.episode_return += reward;
        Ok(StepOutcome {
            reward,
            r1: terms.r1,
            r2: terms.r2,
            r3: terms.r3,
            status,
            observation,
            critical,
        })
    }

    pub fn state(&self) -> &VesselState {
        &self.state
    }

    pub fn obstacles(&self) -> &[Obstacle] {
        &self.obstacles
    }

    pub fn spec(&self) -> &EpisodeSpec {
        &self.spec
    }

    pub fn params(&self) -> &HydroParams {
        &self.params
    }

    pub fn propeller_rate(&self) -> f64 {
        self.n_sp
    }

    pub fn leg(&self) -> usize {
        self.leg
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn episode_return(&self) -> f64 {
        self.episode_return
    }

    pub fn mode(&self) -> Mode {
        self.spec.mode
    }
}
