use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use packet_entropy_cli::error::{CliError, EXIT_OK};
use packet_entropy_cli::scan::DEFAULT_QUAD_NODES;
use packet_entropy_cli::{presets, run_scan, run_tstar, run_validate, write_tstar_csv};
use packet_entropy_cli::{Result, RunOptions, Scenario};

#[derive(Parser)]
#[command(
    name = "packet-entropy",
    version,
    about = "Entropy scans of squeezed Gaussian packets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario file (JSON)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file; standard output when absent
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    jobs: Option<u32>,

    /// Nodes of the θ-average quadrature
    #[arg(long, global = true, default_value_t = DEFAULT_QUAD_NODES)]
    quad_nodes: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Entropy on the (r, θ, t) grid, as CSV
    Scan,
    /// Cross-check the scenario against numerical oracles
    Validate,
    /// Analytic and grid entropy minima per (r, θ), as CSV
    Tstar,
    /// Data for one of the bundled figures, as CSV
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=4))]
        number: u8,
    },
}

fn scenario(cli: &Cli) -> Result<Scenario> {
    match (&cli.command, &cli.config) {
        (Command::Figure { .. }, Some(_)) => Err(CliError::Config(
            "figure uses a bundled scenario; drop --config".into(),
        )),
        (Command::Figure { number }, None) => presets::figure(*number),
        (_, Some(path)) => Scenario::load(path),
        (_, None) => Err(CliError::Config("--config is required".into())),
    }
}

/// Everything is rendered before anything is written, so a failure never
/// leaves a truncated file behind.
fn emit(cli: &Cli, bytes: &[u8]) -> Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, bytes)?,
        None => std::io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    if cli.quad_nodes < 64 || !cli.quad_nodes.is_multiple_of(2) {
        return Err(CliError::Config(format!(
            "--quad-nodes must be even and at least 64, got {}",
            cli.quad_nodes
        )));
    }
    let opts = RunOptions {
        jobs: cli.jobs.map(|n| n as usize),
        quad_nodes: cli.quad_nodes,
    };
    let plan = scenario(cli)?.plan()?;
    let mut buf = Vec::new();
    match cli.command {
        Command::Scan | Command::Figure { .. } => run_scan(&plan, &opts)?.write_csv(&mut buf)?,
        Command::Tstar => write_tstar_csv(&run_tstar(&plan, &opts)?, &mut buf)?,
        Command::Validate => {
            let report = run_validate(&plan, &opts)?;
            buf.extend(report.to_string().into_bytes());
            emit(cli, &buf)?;
            return match report.failures() {
                0 => Ok(()),
                failed => Err(CliError::ValidationFailed { failed }),
            };
        }
    }
    emit(cli, &buf)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::from(EXIT_OK as u8),
        Err(e) => {
            eprintln!("packet-entropy: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
