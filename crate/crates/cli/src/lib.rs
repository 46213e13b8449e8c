//! Command-line driver for the amalgam check suites: seeded instance
//! generation, per-trial checks and JSON reports.

pub mod config;
pub mod instance;
pub mod report;
pub mod suites;

pub use config::{Cli, ContextSpec, RunConfig, Suite};
pub use instance::{gen_instance, Instance};
pub use report::{Aggregate, Report, TrialRecord};
pub use suites::{run_suite, run_trial};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot write report: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

/// Runs the configured suite, writes the report and returns the process exit
/// code: 0 if every trial passed, 1 otherwise.
pub fn execute(cfg: &RunConfig) -> Result<i32, CliError> {
    use std::io::Write;

    let report = run_suite(cfg);
    let json = report.to_json();
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, &json)?;
            let mut out = std::io::stdout().lock();
            let _ = write!(out, "{}", report.summary());
            let _ = writeln!(out, "report written to {}", path.display());
        }
        None => {
            let _ = std::io::stdout().lock().write_all(json.as_bytes());
            let _ = write!(std::io::stderr(), "{}", report.summary());
        }
    }
    Ok(if report.all_passed() { 0 } else { 1 })
}
