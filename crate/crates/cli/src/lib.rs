//! The `hydromag` command line. [`run`] parses arguments, executes one
//! command, writes its table and returns the process exit code.

pub mod args;
pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;

use clap::Parser;
use hydromag_core::zeeman::ZeemanError;

use args::{Cli, Command};
use output::Table;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NOT_FOUND: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage(String),
    NotFound(String),
    NotConverged(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::NotFound(_) => EXIT_NOT_FOUND,
            CliError::NotConverged(_) => EXIT_NOT_CONVERGED,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(s) => write!(f, "usage error: {s}"),
            CliError::NotFound(s) => write!(f, "state not found: {s}"),
            CliError::NotConverged(s) => write!(f, "not converged: {s}"),
            CliError::Io(s) => write!(f, "i/o error: {s}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ZeemanError> for CliError {
    fn from(e: ZeemanError) -> Self {
        match e {
            ZeemanError::StateNotFound { .. } => CliError::NotFound(e.to_string()),
            ZeemanError::NotConverged { .. } | ZeemanError::Numerics(_) => CliError::NotConverged(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

/// A finished command: the table to emit, the exit code, and notes for
/// standard error.
#[derive(Debug, Clone)]
pub struct Report {
    pub table: Table,
    pub code: i32,
    pub notes: Vec<String>,
}

impl Report {
    pub fn ok(table: Table) -> Self {
        Self { table, code: EXIT_OK, notes: Vec::new() }
    }
}

fn execute(cli: Cli) -> Result<(Report, args::OutputArgs), CliError> {
    Ok(match cli.command {
        Command::Energy { state, controls, output } => (commands::energy(&state, &controls, &output)?, output),
        Command::Scan(a) => (commands::scan(&a)?, a.output),
        Command::Density { state, grid, controls, output } => {
            (commands::density(&state, &grid, &controls, &output)?, output)
        }
        Command::Spectrum(a) => (commands::spectrum(&a)?, a.output),
        Command::Verify(a) => (commands::verify(&a)?, a.output),
    })
}

/// Run one invocation; diagnostics go to standard error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = execute(cli).and_then(|(report, out)| {
        let cfg = config::load_config(&out)?;
        let text = report.table.render(config::resolve_format(&out, &cfg))?;
        output::emit(&text, out.out.as_deref())?;
        Ok(report)
    });
    match result {
        Ok(report) => {
            for n in &report.notes {
                eprintln!("hydromag: {n}");
            }
            report.code
        }
        Err(e) => {
            eprintln!("hydromag: {e}");
            e.exit_code()
        }
    }
}
