//! `circmat` command-line interface.
//!
//! Exit codes: 0 on success, 2 for rejected parameters or unreadable input,
//! 3 for numerical failures.

mod commands;
mod config;
mod fieldio;
mod output;

use std::ffi::OsString;
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use commands::Command;
use output::Format;

#[derive(Debug, Parser)]
#[command(name = "circmat", version, about = "Circular Matérn fields and CAR models on the circle")]
#[command(args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// `key=value` file of flags; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Numerical(m) => f.write_str(m),
        }
    }
}

impl From<circmat::Error> for CliError {
    fn from(e: circmat::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

fn parse(args: Vec<OsString>) -> Result<Option<Cli>, CliError> {
    let args = match config::config_path(&args) {
        Some(path) => {
            let file = config::load(path.as_ref()).map_err(CliError::Usage)?;
            config::merge(args, &file)
        }
        None => args,
    };
    match Cli::try_parse_from(args) {
        Ok(cli) => Ok(Some(cli)),
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            Ok(None)
        }
        Err(e) => {
            let rendered = e.to_string();
            let line = rendered.lines().next().unwrap_or("invalid arguments");
            Err(CliError::Usage(line.trim_start_matches("error: ").to_string()))
        }
    }
}

fn run(args: Vec<OsString>) -> Result<(), CliError> {
    let Some(cli) = parse(args)? else {
        return Ok(());
    };
    let report = commands::execute(&cli.command)?;
    let io = |e: std::io::Error| CliError::Usage(format!("cannot write output: {e}"));
    match &cli.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::Usage(format!("cannot create {}: {e}", path.display())))?;
            let mut writer = BufWriter::new(file);
            report.write(cli.format, &mut writer).map_err(io)?;
            writer.flush().map_err(io)
        }
        None => {
            let stdout = std::io::stdout();
            let mut writer = BufWriter::new(stdout.lock());
            report.write(cli.format, &mut writer).map_err(io)?;
            writer.flush().map_err(io)
        }
    }
}

fn main() -> ExitCode {
    match run(std::env::args_os().collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
