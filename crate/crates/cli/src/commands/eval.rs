use navsim_core::agent::{evaluate, sampled_cases, EvalCase};
use navsim_core::dynamics::self_propulsion_rate;
use navsim_core::env::{Point, SamplerConfig};
use navsim_core::TrainConfig;
use serde_json::json;

use super::{inputs, load_checkpoint, load_params, load_scenario, slug};
use crate::error::{CliError, EXIT_MISMATCH};
use crate::manifest::Outputs;
use crate::output::{render_svg, trajectory_csv, Plot};
use crate::EvalArgs;

pub fn eval(args: EvalArgs) -> Result<(), CliError> {
    let c = &args.common;
    let params = load_params(c.params.as_deref())?;
    let ckpt = load_checkpoint(&args.checkpoint)?;
    let mode = ckpt.mode().ok_or_else(|| {
        CliError::new(
            EXIT_MISMATCH,
            anyhow::anyhow!(
                "checkpoint input width {} matches no mode",
                ckpt.network.input_dim()
            ),
        )
    })?;
    let seed = c.seed.unwrap_or(0);

    let mut cases: Vec<EvalCase> = Vec::new();
    for name in &args.scenario {
        if name == "sampled" {
            let sampler = match &ckpt.header.config {
                Some(cfg) => cfg.sampler(),
                None => TrainConfig::defaults(mode).sampler(),
            };
            let sampler = SamplerConfig {
                max_steps: args.steps.unwrap_or(sampler.max_steps),
                ..sampler
            };
            cases.extend(sampled_cases(&sampler, args.episodes.unwrap_or(100), seed));
            continue;
        }
        let scenario = load_scenario(name)?;
        for k in 0..args.episodes.unwrap_or(1) {
            let mut spec = scenario.variant(k, seed);
            if let Some(n) = args.steps {
                spec.max_steps = n;
            }
            cases.push(EvalCase {
                scenario: scenario.name.clone(),
                variant: k,
                spec,
            });
        }
    }

    let mut out = Outputs::begin(
        "eval",
        &c.out,
        Some(seed),
        inputs(
            &[
                ("params", c.params.as_ref()),
                ("checkpoint", Some(&args.checkpoint)),
            ],
            &args.scenario,
        ),
    )?;
    let n_sp = self_propulsion_rate(&params).map_err(anyhow::Error::from)?;
    let (metrics, results) = evaluate(&ckpt.network, &params, n_sp, &cases)?;

    if !args.metrics_only {
        for (case, r) in cases.iter().zip(&results) {
            let stem = format!("{}_v{:03}", slug(&r.scenario), r.variant);
            out.write(
                &format!("trajectories/{stem}.csv"),
                trajectory_csv(&params, &r.trajectory)?,
            )?;
            let track: Vec<Point> = r.trajectory.iter().map(|t| [t.x, t.y]).collect();
            let svg = render_svg(&Plot {
                title: &stem,
                waypoints: &case.spec.waypoints,
                success_radius: case.spec.success_radius,
                obstacles: &case.spec.obstacles,
                obstacle_tracks: &r.obstacle_tracks,
                ship_tracks: &[track],
            });
            out.write(&format!("plots/{stem}.svg"), svg)?;
        }
    }
    let doc = json!({
        "checkpoint": args.checkpoint.display().to_string(),
        "metrics": metrics,
        "episodes": results,
    });
    out.write(
        "metrics.json",
        serde_json::to_string_pretty(&doc).map_err(anyhow::Error::from)? + "\n",
    )?;
    out.finish(true)?;

    for s in &metrics.per_scenario {
        println!(
            "{:<12} episodes {:>4}  success {:>6.1}%  collision {:>6.1}%  return {:>9.2}  xte_rms {:.3}",
            s.scenario,
            s.episodes,
            100.0 * s.success_rate,
            100.0 * s.collision_rate,
            s.mean_return,
            s.mean_xte_rms
        );
    }
    println!(
        "overall      episodes {:>4}  success {:>6.1}%  collision {:>6.1}%",
        metrics.episodes,
        100.0 * metrics.success_rate,
        100.0 * metrics.collision_rate
    );
    Ok(())
}
