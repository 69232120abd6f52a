//! `timelens` command-line front end.

mod commands;
mod config;
mod plots;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Outcome, Overrides};
use config::RunConfig;

/// Time-lens HOM interference simulator.
#[derive(Debug, Parser)]
#[command(name = "timelens", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Points per grid axis (overrides `grid.points`).
    #[arg(long, global = true, value_name = "N")]
    grid_n: Option<usize>,
    /// Factor standing in for "much greater than" in the aperture bounds.
    #[arg(long, global = true, value_name = "X")]
    safety_factor: Option<f64>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// JSA grid, marginal spectra, intensities and the source summary.
    Source,
    /// HOM curves (lens, lensless, CW) and the (δt, δτ) surface.
    Hom,
    /// Visibility against |M| for each configured D.
    Scan,
    /// Temporal-aperture and far-field checks for the configured lens.
    Feasibility,
    /// Closed forms against brute-force quadrature.
    Verify,
}

const EXIT_INVALID: u8 = 1;
const EXIT_VERIFY: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let setup = match load(&cli) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    let overrides = Overrides {
        out: cli.out.clone(),
        grid_n: cli.grid_n,
        safety_factor: cli.safety_factor,
    };
    if let Some(x) = cli.safety_factor {
        if !(x > 0.0 && x.is_finite()) {
            eprintln!("error: --safety-factor {x} must be positive");
            return ExitCode::from(EXIT_INVALID);
        }
    }
    let result = match cli.command {
        Command::Source => commands::cmd_source(&setup, &overrides),
        Command::Hom => commands::cmd_hom(&setup, &overrides),
        Command::Scan => commands::cmd_scan(&setup, &overrides),
        Command::Feasibility => commands::cmd_feasibility(&setup, &overrides),
        Command::Verify => {
            return match commands::cmd_verify(&setup, &overrides) {
                Ok((outcome, report)) => {
                    show(&outcome);
                    if report.passed() {
                        ExitCode::SUCCESS
                    } else {
                        for c in report.failures() {
                            eprintln!(
                                "verification failed: {} (rel err {:.3e} > tolerance {:.1e})",
                                c.quantity, c.rel_err, c.tolerance
                            );
                        }
                        ExitCode::from(EXIT_VERIFY)
                    }
                }
                Err(e) => {
                    eprintln!("verification failed: {e:#}");
                    ExitCode::from(EXIT_VERIFY)
                }
            };
        }
    };
    match result {
        Ok(outcome) => {
            show(&outcome);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}

fn load(cli: &Cli) -> anyhow::Result<config::Setup> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| anyhow::anyhow!("--config PATH is required"))?;
    let cfg = RunConfig::load(path)?;
    if let Some(n) = cli.grid_n {
        if n < 33 || n % 2 == 0 {
            anyhow::bail!("--grid-n {n} must be odd and at least 33");
        }
    }
    cfg.resolve()
}

fn show(outcome: &Outcome) {
    println!("{}", outcome.text.trim_end());
    if let Some(first) = outcome.files.first() {
        let base = first.parent().unwrap_or(first);
        println!("wrote {} in {}", commands::describe(&outcome.files, base), base.display());
    }
}
