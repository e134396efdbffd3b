//! Command-line front-end for two-barrier scattering times, packet runs and
//! the superposition demo.

mod commands;
mod config;
mod error;
mod table;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{RunConfig, Settings};
use error::CliError;
use table::Table;

#[derive(Parser)]
#[command(name = "twobarrier", version, about = "Scattering times of a symmetric two-barrier system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Stationary times over a k or L sweep.
    TimesSweep(Settings),
    /// Gaussian packet run: CM trajectories, norms and extracted times.
    PacketRun(Settings),
    /// Current audit of the naive two-channel split.
    DemoSuperposition(Settings),
    /// Full-transmission wavenumbers in a k range.
    Resonances(Settings),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("twobarrier: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    let (name, settings) = match command {
        Command::TimesSweep(s) => ("times-sweep", s),
        Command::PacketRun(s) => ("packet-run", s),
        Command::DemoSuperposition(s) => ("demo-superposition", s),
        Command::Resonances(s) => ("resonances", s),
    };
    let cfg = RunConfig::resolve(name, settings.merged()?)?;
    match name {
        "times-sweep" => emit(&cfg, cfg.out.as_deref(), &commands::times_sweep(&cfg)?),
        "packet-run" => {
            let (track, times) = commands::packet_run(&cfg)?;
            match &cfg.out {
                Some(path) => {
                    emit(&cfg, Some(path), &track)?;
                    emit(&cfg, Some(&times_path(path)), &times)
                }
                None => {
                    emit(&cfg, None, &track)?;
                    println!();
                    emit(&cfg, None, &times)
                }
            }
        }
        "demo-superposition" => {
            let (table, summary) = commands::demo_superposition(&cfg)?;
            eprintln!("{summary}");
            emit(&cfg, cfg.out.as_deref(), &table)
        }
        _ => emit(&cfg, cfg.out.as_deref(), &commands::resonances(&cfg)?),
    }
}

/// `run.csv` becomes `run.times.csv`.
fn times_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.times.{}", ext.to_string_lossy()),
        None => format!("{stem}.times"),
    };
    path.with_file_name(name)
}

fn emit(cfg: &RunConfig, path: Option<&Path>, table: &Table) -> Result<(), CliError> {
    let mut w: Box<dyn Write> = match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Config(format!("out: cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    };
    table.write(&mut w, cfg.format, cfg.precision)?;
    w.flush()?;
    Ok(())
}
