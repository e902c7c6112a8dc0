use std::path::PathBuf;
use std::process::ExitCode;

use cartan_cli::commands::{charges, fields, simulate, verify};
use cartan_cli::output::OutputDir;
use cartan_cli::{CliError, Scenario};
use clap::{Parser, Subcommand};

/// Torsion and curvature defects on regular grids.
#[derive(Parser)]
#[command(name = "cartan", version, about)]
struct Cli {
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Multiply every grid resolution by K, for convergence studies.
    #[arg(long, global = true, default_value_t = 1, value_name = "K")]
    resolution_scale: usize,
    /// Reserved; all computation is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write torsion, curvature, coframe and connection fields plus figure data.
    Fields { scenario: PathBuf },
    /// Run the residual and charge diagnostics at two resolutions.
    Verify { scenario: PathBuf },
    /// Run the dislocation dynamics block of a scenario.
    Simulate { scenario: PathBuf },
    /// Extract Burgers and Frank charges and loop holonomies.
    Charges { scenario: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Fields { .. } => "fields",
            Command::Verify { .. } => "verify",
            Command::Simulate { .. } => "simulate",
            Command::Charges { .. } => "charges",
        }
    }

    fn scenario(&self) -> &PathBuf {
        match self {
            Command::Fields { scenario }
            | Command::Verify { scenario }
            | Command::Simulate { scenario }
            | Command::Charges { scenario } => scenario,
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let scenario = Scenario::load(cli.command.scenario())?.scaled(cli.resolution_scale)?;
    scenario.validate()?;
    if matches!(cli.command, Command::Simulate { .. }) && scenario.dynamics.is_none() {
        return Err(CliError::Config("simulate needs a `dynamics` block".into()));
    }
    let mut out = OutputDir::prepare(&cli.out)?;
    let mut failure = None;
    match &cli.command {
        Command::Fields { .. } => fields::run(&scenario, &mut out)?,
        Command::Charges { .. } => charges::run(&scenario, &mut out)?,
        Command::Verify { .. } => {
            let report = verify::run(&scenario, &mut out)?;
            for c in &report.checks {
                println!("{:<6} {}", if c.passed { "ok" } else { "FAILED" }, c.name);
            }
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            if !report.passed {
                let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
                failure = Some(CliError::Verification(failed.join(", ")));
            }
        }
        Command::Simulate { .. } => {
            let result = simulate::run(&scenario, &mut out)?;
            println!(
                "{} steps logged, {} reconnection events, ledger discrepancy {:e}",
                result.diagnostics.iter().map(|d| d.step).max().map_or(0, |s| s + 1),
                result.events.len(),
                result.ledger.discrepancy
            );
        }
    }
    let files = out.finish(cli.command.name(), &scenario)?;
    println!("wrote {} files to {}", files.len() + 1, cli.out.display());
    failure.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cartan: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
