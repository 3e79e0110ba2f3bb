//! The `supershift` command-line tool.
//!
//! Exit codes: 0 success, 1 run failure (numerical or I/O), 2 usage error.

pub mod commands;
pub mod config;
pub mod output;
pub mod validate;

use std::ffi::OsString;

pub use config::{parse_config, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Clap(clap::Error),
    #[error("{0}")]
    Run(String),
    #[error(transparent)]
    Core(#[from] supershift_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Clap(e) => e.exit_code(),
            CliError::Run(_) | CliError::Core(_) => 1,
        }
    }
}

pub fn run_validate(_cfg: &RunConfig) -> Result<(), CliError> {
    let reports = validate::run_suites(None);
    print!("{}", validate::format_report(&reports));
    let failed = reports.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        return Err(CliError::Run(format!("{failed} of {} suites failed", reports.len())));
    }
    Ok(())
}

pub fn execute(cfg: &RunConfig) -> Result<(), CliError> {
    use config::Command;
    let body = || match cfg.command {
        Command::Validate => run_validate(cfg),
        Command::Field => commands::run_field(cfg),
        Command::Coeffs => commands::run_coeffs(cfg),
        Command::Supershift => commands::run_supershift(cfg),
        Command::Greens => commands::run_greens(cfg),
    };
    match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Run(format!("thread pool: {e}")))?
            .install(body),
        None => body(),
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let result = parse_config(argv, None).and_then(|cfg| execute(&cfg));
    match result {
        Ok(()) => 0,
        Err(CliError::Clap(e)) => {
            let _ = e.print();
            e.exit_code()
        }
        Err(e) => {
            eprintln!("supershift: {e}");
            e.exit_code()
        }
    }
}
