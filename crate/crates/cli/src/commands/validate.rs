use navsim_core::validate::validate as run_checks;

use super::{inputs, load_params};
use crate::error::{CliError, EXIT_VALIDATION};
use crate::manifest::Outputs;
use crate::ValidateArgs;

pub fn validate(args: ValidateArgs) -> Result<(), CliError> {
    let c = &args.common;
    let params = load_params(c.params.as_deref())?;
    let mut out = Outputs::begin(
        "validate",
        &c.out,
        None,
        inputs(&[("params", c.params.as_ref())], &[]),
    )?;
    let report = run_checks(&params);

    println!("parameter set: {}", report.params);
    if let Some(n) = report.self_propulsion_rate {
        println!("self-propulsion rate: {n:.6}");
    }
    for check in &report.checks {
        let measured: Vec<String> = check
            .measured
            .iter()
            .map(|(k, v)| format!("{k}={v:.6}"))
            .collect();
        println!(
            "{:<5} {:<18} {}  {}",
            if check.passed { "PASS" } else { "FAIL" },
            check.name,
            measured.join(" "),
            check.detail
        );
    }
    out.write(
        "validation.json",
        serde_json::to_string_pretty(&report).map_err(anyhow::Error::from)? + "\n",
    )?;
    let passed = report.passed();
    out.finish(passed)?;
    if passed {
        Ok(())
    } else {
        Err(CliError::new(
            EXIT_VALIDATION,
            anyhow::anyhow!("parameter set `{}` failed validation", report.params),
        ))
    }
}
