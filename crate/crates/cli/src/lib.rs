//! Command-line harness for the pathwise experiments.
//!
//! Commands return a [`Report`]; `main` renders it and maps it to an exit code.

pub mod commands;
pub mod config;
pub mod report;

pub use commands::{bch_check, couple_stats, converge, exactness, run, CHECKS_HELP};
pub use config::{AreaMode, Command, ExperimentConfig, Format, Overrides, Preset, ReferenceChoice};
pub use report::{Check, Report, Row, Slope, RESULTS_VERSION};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] pathwise::Error),
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_GATE_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        EXIT_CONFIG
    }
}

/// Runs a resolved config and writes its output; returns the exit code.
pub fn execute(cfg: &ExperimentConfig, stdout: &mut dyn std::io::Write) -> Result<(Report, i32), CliError> {
    let report = run(cfg)?;
    let text = report.render(cfg.format)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    let code = if report.passed { EXIT_PASS } else { EXIT_GATE_FAILED };
    Ok((report, code))
}
