mod args;
mod config;
mod error;
mod evolve;
mod family;
mod gridspec;
mod lift;
mod ode;
mod reconstruct;
mod report;
mod verify;

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use error::{CliError, CliResult};
use report::Outcome;

fn prepare_out(dir: &Path) -> CliResult<()> {
    if dir.exists() && !dir.is_dir() {
        return Err(CliError::Io(format!("{} is not a directory", dir.display())));
    }
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

fn dispatch(cli: &Cli) -> CliResult<Outcome> {
    match &cli.command {
        Command::Verify(a) => verify::run(a),
        Command::LiftCheck(a) => lift::run(a, cli.seed),
        Command::Reconstruct(a) => reconstruct::run(a),
        Command::Evolve(a) => evolve::run(a, cli.seed),
        Command::Ode(a) => ode::run(a),
    }
}

fn run() -> CliResult<i32> {
    let argv = config::expand(std::env::args().collect()).map_err(CliError::Usage)?;
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return Ok(match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            });
        }
    };
    if let Some(dir) = &cli.out {
        prepare_out(dir)?;
    }
    let outcome = dispatch(&cli)?;
    match &cli.out {
        Some(dir) => report::write_all(dir, &outcome).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?,
        None => print!("{}", report::to_json(&outcome.report)),
    }
    Ok(outcome.status.code())
}

fn main() -> ExitCode {
    let code = match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("selfdual: {e}");
            e.code()
        }
    };
    ExitCode::from(code as u8)
}
