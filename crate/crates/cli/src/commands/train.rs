use std::fs::File;
use std::io::{BufWriter, Write};
use std::time::Instant;

use navsim_core::agent::{self, AgentError, Checkpoint, EpisodeRecord, TrainObserver};
use navsim_core::TrainConfig;
use serde_json::json;

use super::{inputs, load_params};
use crate::error::{CliError, EXIT_DIVERGED};
use crate::manifest::Outputs;
use crate::TrainArgs;

pub const LOG_FILE: &str = "train_log.jsonl";
pub const TIMING_FILE: &str = "timing.jsonl";
pub const FINAL_CHECKPOINT: &str = "final.ckpt";

struct TrainFiles<'a> {
    out: &'a mut Outputs,
    log: BufWriter<File>,
    timing: BufWriter<File>,
    start: Instant,
    total: usize,
    report_every: usize,
}

fn observer_err(e: impl std::fmt::Display) -> AgentError {
    AgentError::Observer(e.to_string())
}

impl TrainObserver for TrainFiles<'_> {
    fn on_episode(&mut self, r: &EpisodeRecord) -> Result<(), AgentError> {
        let line = serde_json::to_string(r).map_err(observer_err)?;
        writeln!(self.log, "{line}").map_err(observer_err)?;
        let wall = self.start.elapsed().as_secs_f64();
        writeln!(
            self.timing,
            "{}",
            json!({"episode": r.episode, "wall_time_s": wall})
        )
        .map_err(observer_err)?;
        let done = r.episode + 1;
        if done.is_multiple_of(self.report_every) || done == self.total {
            eprintln!(
                "episode {done}/{}  avg return {:.2}  epsilon {:.3}  {:.0}s",
                self.total, r.moving_average, r.epsilon, wall
            );
        }
        Ok(())
    }

    fn on_checkpoint(&mut self, c: &Checkpoint) -> Result<(), AgentError> {
        let rel = if c.header.episodes == self.total {
            FINAL_CHECKPOINT.to_string()
        } else {
            format!("checkpoints/ep{:06}.ckpt", c.header.episodes)
        };
        let path = self.out.declare(&rel).map_err(observer_err)?;
        c.save(&path)
    }
}

pub fn train(args: TrainArgs) -> Result<(), CliError> {
    let c = &args.common;
    let mut cfg = TrainConfig::from_path(&args.config).map_err(CliError::input)?;
    if let Some(n) = args.episodes {
        cfg.episodes = n;
    }
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    cfg.validate().map_err(CliError::input)?;
    let params = load_params(c.params.as_deref())?;

    let mut out = Outputs::begin(
        "train",
        &c.out,
        Some(cfg.seed),
        inputs(
            &[
                ("config", Some(&args.config)),
                ("params", c.params.as_ref()),
            ],
            &[],
        ),
    )?;
    out.write(
        "config.json",
        serde_json::to_string_pretty(&cfg).map_err(anyhow::Error::from)? + "\n",
    )?;
    let log = BufWriter::new(File::create(out.declare(LOG_FILE)?)?);
    let timing = BufWriter::new(File::create(out.declare(TIMING_FILE)?)?);
    let mut files = TrainFiles {
        out: &mut out,
        log,
        timing,
        start: Instant::now(),
        total: cfg.episodes,
        report_every: (cfg.episodes / 20).max(1),
    };
    let result = agent::train(&cfg, &params, &mut files);
    files.log.flush()?;
    files.timing.flush()?;
    drop(files);

    match result {
        Ok(outcome) => {
            out.finish(true)?;
            if let Some(last) = outcome.records.last() {
                println!(
                    "trained {} episodes, final 100-episode average return {:.2}",
                    outcome.records.len(),
                    last.moving_average
                );
            }
            Ok(())
        }
        Err(AgentError::NonFiniteLoss {
            episode,
            update,
            last_good,
        }) => {
            if let Some(ckpt) = last_good {
                let path = out.declare("last_good.ckpt")?;
                ckpt.save(&path)?;
            }
            out.finish(false)?;
            Err(CliError::new(
                EXIT_DIVERGED,
                anyhow::anyhow!(
                    "training diverged: non-finite loss at episode {episode}, update {update}"
                ),
            ))
        }
        Err(e) => {
            out.finish(false)?;
            Err(e.into())
        }
    }
}
