//! `crowlase`: figure presets, scenario runs, parameter sweeps and quick
//! invariant checks for a microcavity coupled to a coupled-resonator
//! waveguide.

mod check;
mod config;
mod csv;
mod error;
mod figures;
mod scenario;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crowlase_core::Complex64;

use crate::config::Scenario;
use crate::error::{CliError, Result};
use crate::figures::Figure;
use crate::scenario::Overrides;

#[derive(Debug, Parser)]
#[command(name = "crowlase", version, about = "Microcavity-CROW dynamics: figures, runs, sweeps, checks")]
struct Cli {
    /// Output directory, created when missing.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Time step, in units of 1/kappa.
    #[arg(long, global = true)]
    dt: Option<f64>,
    /// Lattice sites per side.
    #[arg(long, global = true)]
    sites: Option<usize>,
    /// End time t, in units of 1/kappa (the CSV axis is 2 kappa t).
    #[arg(long, global = true)]
    tmax: Option<f64>,
    /// Starting guess for the resonance pole, as `re,im`.
    #[arg(long, global = true, value_parser = parse_complex, allow_hyphen_values = true)]
    seed_pole: Option<Complex64>,
    /// Allow runs past the validity horizon.
    #[arg(long, global = true)]
    no_boundary_guard: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the CSV panels of a figure preset.
    Figure { name: Figure },
    /// Run one scenario file.
    Run { config: PathBuf },
    /// Run a scenario file over `sweep_param` x `sweep_values`.
    Sweep { config: PathBuf },
    /// Run the quick invariant checks.
    Check,
}

fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected re,im, got {s:?}"))?;
    let part = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
    Ok(Complex64::new(part(re)?, part(im)?))
}

impl Cli {
    fn overrides(&self) -> Result<Overrides> {
        for (flag, v) in [("--dt", self.dt), ("--tmax", self.tmax)] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(CliError::Config(format!("{flag} must be positive, got {v}")));
                }
            }
        }
        if self.sites == Some(0) {
            return Err(CliError::Config("--sites must be at least 1".into()));
        }
        Ok(Overrides {
            dt: self.dt,
            sites: self.sites,
            t_max: self.tmax,
            seed_pole: self.seed_pole,
            no_boundary_guard: self.no_boundary_guard,
        })
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn print_summary(summary: &scenario::Summary) {
    println!("{}", summary.to_toml().trim_end());
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let o = cli.overrides()?;
    match &cli.command {
        Command::Figure { name } => {
            ensure_dir(&cli.out)?;
            for file in figures::run_figure(*name, &cli.out, &o)? {
                println!("wrote {}", cli.out.join(file).display());
            }
        }
        Command::Run { config } => {
            let s = Scenario::load(config)?;
            let outcome = scenario::run(&s, &o)?;
            ensure_dir(&cli.out)?;
            print_summary(&outcome.write(&cli.out)?);
        }
        Command::Sweep { config } => {
            let s = Scenario::load(config)?;
            let points = scenario::sweep(&s, &o)?;
            let total = points.len();
            ensure_dir(&cli.out)?;
            let mut done = Vec::new();
            let mut first_error = None;
            for (value, result) in points {
                match result.and_then(|outcome| outcome.write(&cli.out)) {
                    Ok(summary) => done.push((value, summary)),
                    Err(e) => {
                        eprintln!("sweep point {value}: {e}");
                        first_error.get_or_insert(e);
                    }
                }
            }
            let rows: Vec<(f64, &scenario::Summary)> = done.iter().map(|(v, s)| (*v, s)).collect();
            let path = cli.out.join(format!("{}_sweep.csv", s.name));
            scenario::sweep_table(&s, &o, &rows).write(&path)?;
            println!("wrote {} ({} of {} points)", path.display(), done.len(), total);
            if let Some(e) = first_error {
                return Err(e);
            }
        }
        Command::Check => {
            let lines = check::run_checks();
            for line in &lines {
                println!("{}", line.render());
            }
            if lines.iter().any(|l| !l.ok) {
                return Ok(ExitCode::from(4));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("crowlase: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
