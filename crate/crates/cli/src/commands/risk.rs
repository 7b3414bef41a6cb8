use navsim_core::env::{assess_obstacles, Env, Status, CONTROL_PERIOD};

use super::{inputs, load_params, load_scenario, LoadedPolicy};
use crate::error::CliError;
use crate::manifest::Outputs;
use crate::output::{risk_csv, RiskStep};
use crate::RiskArgs;

pub fn risk(args: RiskArgs) -> Result<(), CliError> {
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
        "risk",
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
    let mut obs = env.reset().map_err(anyhow::Error::from)?;
    let record = |env: &Env| {
        let (assessments, critical) = assess_obstacles(env.state(), env.obstacles());
        RiskStep {
            step: env.steps(),
            t: env.steps() as f64 * CONTROL_PERIOD,
            assessments,
            critical: critical.map(|c| c.obstacle_id),
        }
    };
    let mut steps = vec![record(&env)];
    while env.status() == Status::Running && env.steps() < spec.max_steps {
        let a = policy.as_policy().action(&obs)?;
        obs = env.step(a).map_err(anyhow::Error::from)?.observation;
        steps.push(record(&env));
    }
    out.write("risk.csv", risk_csv(&params, &steps)?)?;
    out.finish(true)?;
    println!(
        "{}: {} steps, {:?}",
        scenario.name,
        env.steps(),
        env.status()
    );
    Ok(())
}
