//! Scenario runner for the quasi-Einstein verification toolkit.
//!
//! A scenario is a TOML file naming a `kind` and its `params`; running it
//! produces a report (text or JSON lines) plus any CSV artifacts, all written
//! atomically into an output directory.

pub mod config;
pub mod error;
pub mod output;
pub mod report;
pub mod run;

use std::path::Path;
use std::time::Instant;

pub use config::{load_scenario, parse_scenario, Scenario};
pub use error::CliError;
pub use report::{emit_report, Check, Format, Report};

fn write_outcome(name: &str, outcome: &run::Outcome, out_dir: &Path, format: Format) -> Result<Vec<u8>, CliError> {
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
    let bytes = emit_report(&outcome.report, format);
    output::write_atomic(&out_dir.join(format!("{name}.report.{}", format.extension())), &bytes)?;
    for a in &outcome.artifacts {
        output::write_atomic(&out_dir.join(&a.file_name), &a.bytes)?;
    }
    Ok(bytes)
}

/// Runs one scenario and writes its report and artifacts into `out_dir`.
/// Returns the report together with its serialised bytes.
pub fn run_scenario(scenario: &Scenario, out_dir: &Path, format: Format) -> Result<(Report, Vec<u8>), CliError> {
    let start = Instant::now();
    let mut outcome = run::execute(scenario)?;
    outcome.report.timing = start.elapsed().as_secs_f64();
    let bytes = write_outcome(&scenario.name, &outcome, out_dir, format)?;
    Ok((outcome.report, bytes))
}

/// Runs a `shoot` scenario over several shooting parameters.
pub fn run_sweep(
    scenario: &Scenario,
    values: &[f64],
    out_dir: &Path,
    format: Format,
) -> Result<(Report, Vec<u8>), CliError> {
    let start = Instant::now();
    let mut outcome = run::execute_sweep(scenario, values)?;
    outcome.report.timing = start.elapsed().as_secs_f64();
    let name = format!("{}.sweep", scenario.name);
    let bytes = write_outcome(&name, &outcome, out_dir, format)?;
    Ok((outcome.report, bytes))
}
