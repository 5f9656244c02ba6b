//! Command-line orchestration for the `lightstage` toolkit.
//!
//! Every command emits a canonical JSON run report whose `config_hash`
//! identifies the resolved parameters. Failures print one JSON line on stderr
//! and exit with 2 (usage), 3 (unreadable or malformed input) or 4 (numeric or
//! validation failure).

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod report;

use std::io::Write;

pub use args::Cli;
pub use error::{CliError, CliResult, ErrorKind};
pub use manifest::{read_manifest, write_manifest, LightRef, Manifest};
pub use report::RunReport;

use commands::{dispatch, Context};
use config::PipelineConfig;

/// Runs a parsed command line and returns its report.
pub fn run(cli: &Cli) -> CliResult<RunReport> {
    let config = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(n) = cli.threads.or(config.threads) {
        if n == 0 {
            return Err(CliError::usage("--threads must be at least 1"));
        }
        // a pool configured earlier in the same process is kept
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let ctx = Context {
        seed: cli.seed.or(config.seed).unwrap_or(0),
        config,
    };
    let outcome = dispatch(&cli.command, &ctx)?;
    let report = RunReport::new(
        cli.command.name(),
        outcome.params,
        outcome.results,
        outcome.artifacts.iter().map(|p| p.display().to_string()).collect(),
    );
    let text = report.to_canonical()?;
    let mut targets = Vec::new();
    if let Some(dir) = &outcome.report_dir {
        targets.push(dir.join("report.json"));
    }
    targets.extend(cli.report.clone());
    for path in targets {
        std::fs::write(&path, format!("{text}\n")).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    }
    if !cli.quiet {
        let mut out = std::io::stdout().lock();
        let _ = writeln!(out, "{text}");
    }
    Ok(report)
}
