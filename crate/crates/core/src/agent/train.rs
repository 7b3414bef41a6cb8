use std::collections::VecDeque;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    act, epsilon_at, AgentError, Checkpoint, Learner, QNetwork, ReplayBuffer, RngState,
    TrainConfig, Transition,
};
use crate::dynamics::{self_propulsion_rate, HydroParams};
use crate::env::{sample_episode, Env, Status};

pub const MOVING_AVERAGE_WINDOW: usize = 100;

const INIT_STREAM: u64 = 0;
const ENV_STREAM: u64 = 1;
const AGENT_STREAM: u64 = 2;

/// One line of the training log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub episode: usize,
    #[serde(rename = "return")]
    pub episode_return: f64,
    pub moving_average: f64,
    pub epsilon: f64,
    pub steps: usize,
    pub status: Status,
    /// Mean loss of the updates made during the episode.
    pub mean_loss: Option<f64>,
    pub learning_rate: f64,
}

/// Hooks called by [`train`] as the run progresses.
pub trait TrainObserver {
    fn on_episode(&mut self, _record: &EpisodeRecord) -> Result<(), AgentError> {
        Ok(())
    }

    fn on_checkpoint(&mut self, _checkpoint: &Checkpoint) -> Result<(), AgentError> {
        Ok(())
    }
}

impl TrainObserver for () {}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub checkpoint: Checkpoint,
    pub records: Vec<EpisodeRecord>,
}

struct Progress {
    env_steps: u64,
    episodes: usize,
}

fn snapshot(
    learner: &Learner,
    cfg: &TrainConfig,
    progress: &Progress,
    env_rng: &ChaCha8Rng,
    agent_rng: &ChaCha8Rng,
) -> Checkpoint {
    let mut c = Checkpoint::new(learner.net.clone(), Some(cfg.clone()));
    c.header.training_step = progress.env_steps;
    c.header.updates = learner.updates();
    c.header.episodes = progress.episodes;
    c.header.rng = Some(RngState {
        env: env_rng.clone(),
        agent: agent_rng.clone(),
    });
    c
}

fn seeded(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Runs `cfg.episodes` training episodes on sampled scenarios. Fully
/// determined by `cfg` (including its seed) and `params`.
pub fn train(
    cfg: &TrainConfig,
    params: &HydroParams,
    observer: &mut dyn TrainObserver,
) -> Result<TrainOutcome, AgentError> {
    cfg.validate()?;
    let n_sp = self_propulsion_rate(params).map_err(crate::env::EnvError::from)?;
    let mut init_rng = seeded(cfg.seed, INIT_STREAM);
    let mut env_rng = seeded(cfg.seed, ENV_STREAM);
    let mut agent_rng = seeded(cfg.seed, AGENT_STREAM);

    let widths = cfg.widths();
    let mut learner = Learner::new(QNetwork::new(&widths, &mut init_rng)?);
    let mut buffer = ReplayBuffer::new(cfg.buffer_capacity, widths[0]);
    let sampler = cfg.sampler();
    let mut env: Option<Env> = None;

    let mut progress = Progress {
        env_steps: 0,
        episodes: 0,
    };
    let mut last_good = snapshot(&learner, cfg, &progress, &env_rng, &agent_rng);
    let mut window: VecDeque<f64> = VecDeque::with_capacity(MOVING_AVERAGE_WINDOW);
    let mut records = Vec::with_capacity(cfg.episodes);

    for episode in 0..cfg.episodes {
        let epsilon = epsilon_at(episode, cfg.episodes);
        let spec = sample_episode(&mut env_rng, &sampler);
        let mut obs = match env.as_mut() {
            Some(e) => e.reset_with(spec)?,
            None => {
                let e = env.insert(Env::with_rate(params.clone(), n_sp, spec)?);
                e.observation()?.0
            }
        };
        let env = env.as_mut().unwrap();
        let mut loss_sum = 0.0;
        let mut loss_count = 0usize;

        loop {
            let s = obs.features();
            let a = act(&learner.net, &s, epsilon, &mut agent_rng)?;
            let out = env.step(a)?;
            let s_next = out.observation.features();
            // hitting the step cap truncates the episode; it is not a terminal state
            let done = out.status.is_terminal() && out.status != Status::StepLimit;
            buffer.push(Transition {
                s,
                a,
                r: out.reward,
                s_next,
                done,
            })?;
            progress.env_steps += 1;

            if progress.env_steps.is_multiple_of(cfg.update_every as u64)
                && buffer.len() >= cfg.batch_size
            {
                let batch = buffer.sample(&mut agent_rng, cfg.batch_size)?;
                let lr = cfg.lr_at(learner.updates());
                match learner.update(&batch, cfg.gamma, lr) {
                    Ok(loss) => {
                        loss_sum += loss;
                        loss_count += 1;
                    }
                    Err(AgentError::NonFiniteLoss { update, .. }) => {
                        return Err(AgentError::NonFiniteLoss {
                            episode,
                            update,
                            last_good: Some(Box::new(last_good)),
                        })
                    }
                    Err(e) => return Err(e),
                }
            }
            if progress
                .env_steps
                .is_multiple_of(cfg.target_update_every as u64)
            {
                learner.soft_update(cfg.tau)?;
            }
            obs = out.observation;
            if out.status.is_terminal() {
                break;
            }
        }

        let ret = env.episode_return();
        if window.len() == MOVING_AVERAGE_WINDOW {
            window.pop_front();
        }
        window.push_back(ret);
        let record = EpisodeRecord {
            episode,
            episode_return: ret,
            moving_average: window.iter().sum::<f64>() / window.len() as f64,
            epsilon,
            steps: env.steps(),
            status: env.status(),
            mean_loss: (loss_count > 0).then(|| loss_sum / loss_count as f64),
            learning_rate: cfg.lr_at(learner.updates()),
        };
        observer.on_episode(&record)?;
        records.push(record);
        progress.episodes = episode + 1;

        if cfg.checkpoint_every > 0 && progress.episodes.is_multiple_of(cfg.checkpoint_every) {
            last_good = snapshot(&learner, cfg, &progress, &env_rng, &agent_rng);
            if progress.episodes < cfg.episodes {
                observer.on_checkpoint(&last_good)?;
            }
        }
    }

    let checkpoint = snapshot(&learner, cfg, &progress, &env_rng, &agent_rng);
    observer.on_checkpoint(&checkpoint)?;
    Ok(TrainOutcome {
        checkpoint,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::Mode;

    fn tiny(mode: Mode) -> TrainConfig {
        TrainConfig {
            episodes: 6,
            max_steps: 30,
            hidden: vec![16, 16],
            batch_size: 16,
            buffer_capacity: 500,
            checkpoint_every: 2,
            seed: 7,
            ..TrainConfig::defaults(mode)
        }
    }

    #[derive(Default)]
    struct Collect {
        episodes: usize,
        checkpoints: Vec<usize>,
    }

    impl TrainObserver for Collect {
        fn on_episode(&mut self, _: &EpisodeRecord) -> Result<(), AgentError> {
            self.episodes += 1;
            Ok(())
        }

        fn on_checkpoint(&mut self, c: &Checkpoint) -> Result<(), AgentError> {
            self.checkpoints.push(c.header.episodes);
            Ok(())
        }
    }

    #[test]
    fn runs_are_reproducible() {
        let params = HydroParams::kcs_like();
        for mode in [Mode::Static, Mode::Dynamic] {
            let a = train(&tiny(mode), &params, &mut ()).unwrap();
            let b = train(&tiny(mode), &params, &mut ()).unwrap();
            assert_eq!(a.records, b.records);
            assert_eq!(a.checkpoint.to_bytes(), b.checkpoint.to_bytes());
            assert!(a.checkpoint.header.updates > 0);
            let mut other = tiny(mode);
            other.seed = 8;
            let c = train(&other, &params, &mut ()).unwrap();
            assert_ne!(a.records, c.records);
        }
    }

    #[test]
    fn log_and_checkpoint_bookkeeping() {
        let params = HydroParams::kcs_like();
        let cfg = tiny(Mode::Static);
        let mut obs = Collect::default();
        let out = train(&cfg, &params, &mut obs).unwrap();
        assert_eq!(out.records.len(), 6);
        assert_eq!(obs.episodes, 6);
        assert_eq!(obs.checkpoints, vec![2, 4, 6]);
        assert_eq!(out.records[0].epsilon, 1.0);
        assert!((out.records[3].epsilon - 0.5).abs() < 1e-12);
        let total: usize = out.records.iter().map(|r| r.steps).sum();
        assert_eq!(out.checkpoint.header.training_step, total as u64);
        assert_eq!(
            out.checkpoint.header.updates,
            (total / cfg.update_every) as u64 - 1
        );
        for (i, r) in out.records.iter().enumerate() {
            let mean = out.records[..=i]
                .iter()
                .map(|r| r.episode_return)
                .sum::<f64>()
                / (i + 1) as f64;
            assert!((r.moving_average - mean).abs() < 1e-9);
            assert!(r.status.is_terminal());
        }
        let back = Checkpoint::from_bytes(&out.checkpoint.to_bytes()).unwrap();
        assert_eq!(back.header.config.as_ref(), Some(&cfg));
    }

    #[test]
    fn moving_average_uses_last_hundred() {
        let mut w: VecDeque<f64> = VecDeque::new();
        let mut last = 0.0;
        for k in 0..250 {
            if w.len() == MOVING_AVERAGE_WINDOW {
                w.pop_front();
            }
            w.push_back(k as f64);
            last = w.iter().sum::<f64>() / w.len() as f64;
        }
        assert_eq!(last, (150..250).sum::<usize>() as f64 / 100.0);
    }

    #[test]
    fn invalid_config_rejected() {
        let mut cfg = tiny(Mode::Static);
        cfg.gamma = 1.5;
        assert!(matches!(
            train(&cfg, &HydroParams::kcs_like(), &mut ()),
            Err(AgentError::InvalidConfig(_))
        ));
    }
}
