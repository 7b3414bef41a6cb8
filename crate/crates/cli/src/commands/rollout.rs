use navsim_core::agent::run_episode;
use navsim_core::env::{Env, Point};

use super::{inputs, load_params, load_scenario, LoadedPolicy};
use crate::error::CliError;
use crate::manifest::Outputs;
use crate::output::{render_svg, trajectory_csv, Plot};
use crate::RolloutArgs;

pub fn rollout(args: RolloutArgs) -> Result<(), CliError> {
    let c = &args.common;
    let params = load_params(c.params.as_deref())?;
    let scenario = load_scenario(&args.scenario)?;
    let policy = LoadedPolicy::load(&args.policy)?;
    let mut spec = scenario.to_spec();
    if let Some(n) = args.steps {
        spec.max_steps = n;
    }
    policy.check(&spec)?;

    let mut out = Outputs::begin(
        "rollout",
        &c.out,
        c.seed,
        inputs(
            &[
                ("params", c.params.as_ref()),
                ("checkpoint", args.policy.checkpoint.as_ref()),
            ],
            std::slice::from_ref(&args.scenario),
        ),
    )?;
    let mut env = Env::new(params.clone(), spec.clone()).map_err(anyhow::Error::from)?;
    let result = run_episode(&mut env, policy.as_policy(), spec.clone())?;

    out.write(
        "trajectory.csv",
        trajectory_csv(&params, &result.trajectory)?,
    )?;
    let track: Vec<Point> = result.trajectory.iter().map(|r| [r.x, r.y]).collect();
    let svg = render_svg(&Plot {
        title: &scenario.name,
        waypoints: &spec.waypoints,
        success_radius: spec.success_radius,
        obstacles: &spec.obstacles,
        obstacle_tracks: &result.obstacle_tracks,
        ship_tracks: &[track],
    });
    out.write("track.svg", svg)?;
    out.finish(true)?;
    println!(
        "{}: {:?} after {} steps, return {:.3}",
        scenario.name, result.status, result.steps, result.episode_return
    );
    Ok(())
}
