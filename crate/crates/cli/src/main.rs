mod args;
mod commands;
mod config;
mod output;

use std::ffi::OsString;
use std::process::ExitCode;

use clap::{CommandFactory, Parser};

use args::Cli;

/// Failure classes, each with its own exit status.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Domain(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Domain(m) => write!(f, "{m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
        }
    }
}

impl From<exuberance::Error> for CliError {
    fn from(e: exuberance::Error) -> Self {
        use exuberance::Error as E;
        let msg = e.to_string();
        match e {
            E::Config(m) => CliError::Config(m),
            E::InvalidParameter(_) => CliError::Config(msg),
            E::Io { .. } | E::Csv(_) | E::Ingestion { .. } | E::DuplicateTimestamp { .. } => CliError::Io(msg),
            _ => CliError::Domain(msg),
        }
    }
}

/// The subcommand and `--config` file named on the command line, found
/// without a full parse so that required flags may come from the file.
fn prescan(argv: &[OsString]) -> (Option<String>, Option<OsString>) {
    let names: Vec<String> = Cli::command().get_subcommands().map(|c| c.get_name().to_string()).collect();
    let mut sub = None;
    let mut cfg = None;
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            cfg = it.next().cloned();
        } else if let Some(v) = s.strip_prefix("--config=") {
            cfg = Some(v.into());
        } else if sub.is_none() && names.iter().any(|n| *n == s) {
            sub = Some(s.into_owned());
        }
    }
    (sub, cfg)
}

fn run(argv: Vec<OsString>) -> Result<(), CliError> {
    let argv = match prescan(&argv) {
        (Some(sub), Some(cfg)) => config::merge(&argv, std::path::Path::new(&cfg), &sub)?,
        _ => argv,
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            if code == 0 {
                return Ok(());
            }
            return Err(CliError::Config("invalid command line".into()));
        }
    };
    if let Some(n) = cli.global.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let written = commands::dispatch(&cli)?;
    for p in written {
        println!("{}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(std::env::args_os().collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(m)) if m == "invalid command line" => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
