use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{argmax, AgentError, QNetwork};
use crate::env::{
    distance, sample_episode, Env, EpisodeSpec, Observation, Point, SamplerConfig, Status,
    N_ACTIONS,
};

/// Maps observations to action indices.
pub trait Policy {
    fn action(&self, obs: &Observation) -> Result<usize, AgentError>;

    /// Observation width the policy needs, if it has one.
    fn input_dim(&self) -> Option<usize> {
        None
    }
}

/// Greedy policy of the network.
impl Policy for QNetwork {
    fn action(&self, obs: &Observation) -> Result<usize, AgentError> {
        Ok(argmax(&self.forward(&obs.features())?))
    }

    fn input_dim(&self) -> Option<usize> {
        Some(QNetwork::input_dim(self))
    }
}

/// Always the same rudder command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedAction(pub usize);

impl Policy for FixedAction {
    fn action(&self, _: &Observation) -> Result<usize, AgentError> {
        if self.0 >= N_ACTIONS {
            return Err(crate::env::EnvError::InvalidAction(self.0).into());
        }
        Ok(self.0)
    }
}

/// Ship state and guidance quantities at one control instant. Angles in
/// radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub psi: f64,
    pub u: f64,
    pub v: f64,
    pub r: f64,
    pub delta: f64,
    pub d_c: f64,
    pub chi_e: f64,
    pub d_wp: f64,
    /// Collision risk of the critical obstacle, 0 without obstacles.
    pub cr: f64,
    /// Reward received on the step that led here, 0 for the initial row.
    pub reward: f64,
    pub leg: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    pub scenario: String,
    pub variant: usize,
    pub status: Status,
    #[serde(rename = "return")]
    pub episode_return: f64,
    pub steps: usize,
    pub legs_completed: usize,
    pub xte_rms: f64,
    /// Smallest distance from the ship to any obstacle edge.
    pub min_clearance: Option<f64>,
    #[serde(skip)]
    pub trajectory: Vec<TrajectoryRow>,
    /// Obstacle centres at each row, per obstacle.
    #[serde(skip)]
    pub obstacle_tracks: Vec<Vec<Point>>,
}

impl EpisodeResult {
    pub fn success(&self) -> bool {
        self.status == Status::Success
    }
}

fn row(env: &Env, obs: &Observation, cr: f64, reward: f64) -> TrajectoryRow {
    let s = env.state();
    TrajectoryRow {
        t: env.steps() as f64 * crate::env::CONTROL_PERIOD,
        x: s.x,
        y: s.y,
        psi: s.psi,
        u: s.u,
        v: s.v,
        r: s.r,
        delta: s.delta,
        d_c: obs.d_c,
        chi_e: obs.chi_e,
        d_wp: obs.d_wp,
        cr,
        reward,
        leg: env.leg(),
    }
}

fn clearance(env: &Env) -> Option<f64> {
    let pos = env.state().position();
    env.obstacles()
        .iter()
        .map(|o| distance(pos, o.position()) - o.radius)
        .reduce(f64::min)
}

/// Runs one episode of `spec` to termination (or its step cap).
pub fn run_episode<P: Policy + ?Sized>(
    env: &mut Env,
    policy: &P,
    spec: EpisodeSpec,
) -> Result<EpisodeResult, AgentError> {
    if let Some(d) = policy.input_dim() {
        if d != spec.mode.obs_dim() {
            return Err(AgentError::DimensionMismatch {
                expected: d,
                found: spec.mode.obs_dim(),
            });
        }
    }
    let mut obs = env.reset_with(spec)?;
    let cr0 = env.observation()?.1.map_or(0.0, |c| c.cr);
    let mut trajectory = vec![row(env, &obs, cr0, 0.0)];
    let mut obstacle_tracks: Vec<Vec<Point>> =
        env.obstacles().iter().map(|o| vec![o.position()]).collect();
    let mut min_clearance = clearance(env);

    while env.status() == Status::Running && env.steps() < env.spec().max_steps {
        let out = env.step(policy.action(&obs)?)?;
        obs = out.observation;
        trajectory.push(row(
            env,
            &obs,
            out.critical.map_or(0.0, |c| c.cr),
            out.reward,
        ));
        for (track, o) in obstacle_tracks.iter_mut().zip(env.obstacles()) {
            track.push(o.position());
        }
        min_clearance = match (min_clearance, clearance(env)) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
    }

    let xte_rms =
        (trajectory.iter().map(|r| r.d_c * r.d_c).sum::<f64>() / trajectory.len() as f64).sqrt();
    let legs_completed = env.leg() + usize::from(env.status() == Status::Success);
    Ok(EpisodeResult {
        scenario: String::new(),
        variant: 0,
        status: env.status(),
        episode_return: env.episode_return(),
        steps: env.steps(),
        legs_completed,
        xte_rms,
        min_clearance,
        trajectory,
        obstacle_tracks,
    })
}

/// One evaluation episode: a named scenario variant.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalCase {
    pub scenario: String,
    pub variant: usize,
    pub spec: EpisodeSpec,
}

/// Stream reserved for evaluation draws, distinct from the training streams.
const EVAL_STREAM: u64 = 7;

/// `n` freshly sampled episodes, named `sampled`, variants `0..n`.
pub fn sampled_cases(sampler: &SamplerConfig, n: usize, seed: u64) -> Vec<EvalCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(EVAL_STREAM);
    (0..n)
        .map(|variant| EvalCase {
            scenario: "sampled".into(),
            variant,
            spec: sample_episode(&mut rng, sampler),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioMetrics {
    pub scenario: String,
    pub episodes: usize,
    pub success_rate: f64,
    pub collision_rate: f64,
    pub mean_return: f64,
    pub mean_xte_rms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalMetrics {
    pub episodes: usize,
    pub success_rate: f64,
    pub collision_rate: f64,
    pub mean_return: f64,
    pub mean_xte_rms: f64,
    pub per_scenario: Vec<ScenarioMetrics>,
}

fn summarize(name: &str, results: &[&EpisodeResult]) -> ScenarioMetrics {
    let n = results.len() as f64;
    let frac = |s: Status| results.iter().filter(|r| r.status == s).count() as f64 / n;
    ScenarioMetrics {
        scenario: name.to_string(),
        episodes: results.len(),
        success_rate: frac(Status::Success),
        collision_rate: frac(Status::Collision),
        mean_return: results.iter().map(|r| r.episode_return).sum::<f64>() / n,
        mean_xte_rms: results.iter().map(|r| r.xte_rms).sum::<f64>() / n,
    }
}

/// Runs every case with `policy` (in parallel) and aggregates the results
/// in case order.
pub fn evaluate<P: Policy + Sync + ?Sized>(
    policy: &P,
    params: &crate::dynamics::HydroParams,
    propeller_rate: f64,
    cases: &[EvalCase],
) -> Result<(EvalMetrics, Vec<EpisodeResult>), AgentError> {
    if cases.is_empty() {
        return Err(AgentError::NoScenarios);
    }
    let results = cases
        .par_iter()
        .map(|c| {
            let mut env = Env::with_rate(params.clone(), propeller_rate, c.spec.clone())?;
            let mut r = run_episode(&mut env, policy, c.spec.clone())?;
            r.scenario = c.scenario.clone();
            r.variant = c.variant;
            Ok(r)
        })
        .collect::<Result<Vec<_>, AgentError>>()?;

    let mut names: Vec<&str> = Vec::new();
    for c in cases {
        if !names.contains(&c.scenario.as_str()) {
            names.push(&c.scenario);
        }
    }
    let per_scenario = names
        .iter()
        .map(|n| {
            let rs: Vec<_> = results.iter().filter(|r| r.scenario == *n).collect();
            summarize(n, &rs)
        })
        .collect();
    let all: Vec<_> = results.iter().collect();
    let total = summarize("", &all);
    Ok((
        EvalMetrics {
            episodes: total.episodes,
            success_rate: total.success_rate,
            collision_rate: total.collision_rate,
            mean_return: total.mean_return,
            mean_xte_rms: total.mean_xte_rms,
            per_scenario,
        },
        results,
    ))
}
