//! Command-line front end: parses symbol and Blaschke specs, runs the
//! checks and theorem harnesses of `hm-core`, and emits JSON reports.

pub mod args;
pub mod commands;
pub mod config;
pub mod spec;

use std::path::Path;

use serde::Serialize;

pub use args::Cli;
pub use config::RunConfig;
pub use spec::{ParseError, SymbolSpec, ThetaSpec};

pub const TOOL: &str = "hm";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exit status for malformed input, non-self-maps and I/O failures.
pub const EXIT_INPUT: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid {field}: {message}")]
    Input { field: String, message: String },
    #[error(transparent)]
    Core(#[from] hm_core::Error),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn input(field: &str, e: impl std::fmt::Display) -> Self {
        CliError::Input { field: field.to_string(), message: e.to_string() }
    }
}

/// Exit status plus the command-specific report body.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub report: serde_json::Value,
}

#[derive(Serialize)]
struct Envelope<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a RunConfig,
    exit_code: i32,
    report: &'a serde_json::Value,
}

/// Full JSON document for a finished command. Contains nothing that varies
/// between runs with the same inputs.
pub fn render(command: &str, cfg: &RunConfig, outcome: &Outcome) -> String {
    let env = Envelope { tool: TOOL, version: VERSION, command, config: cfg, exit_code: outcome.code, report: &outcome.report };
    let mut s = serde_json::to_string_pretty(&env).expect("report serializes");
    s.push('\n');
    s
}

/// Writes `<output_dir>/<command with spaces as dashes>.json`.
pub fn write_report(dir: &Path, command: &str, text: &str) -> Result<std::path::PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(format!("{}.json", command.replace(' ', "-")));
    std::fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

/// Runs a parsed command line and returns the process exit status.
pub fn run(cli: Cli) -> i32 {
    let env_dir = std::env::var_os(config::OUTPUT_DIR_ENV).filter(|v| !v.is_empty()).map(Into::into);
    let cfg = match RunConfig::resolve(cli.global.config.as_deref(), env_dir, &cli.global.overrides()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let name = cli.command.name();
    let outcome = match commands::dispatch(&cli.command, &cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let text = render(&name, &cfg, &outcome);
    print!("{text}");
    if let Some(dir) = &cfg.output_dir {
        if let Err(e) = write_report(dir, &name, &text) {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    }
    outcome.code
}
