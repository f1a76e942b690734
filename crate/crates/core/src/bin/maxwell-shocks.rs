use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use maxwell_shocks::harness::{self, RelaxationRow, RiemannRow};
use maxwell_shocks::{Error, ExperimentConfig};

#[derive(Parser)]
#[command(
    version,
    about = "Composite viscous double shocks with Maxwell relaxation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Middle state, shock speeds, strengths and the largest admissible tau.
    Riemann(Common),
    /// Traveling-wave profiles of both shocks and their tail decay.
    Profile(Common),
    /// Perturbed composite wave evolved with shifts and diagnostics.
    Stability(Common),
    /// Relaxed runs for every tau in `taus` against the classical run.
    RelaxationLimit(Common),
}

#[derive(Args)]
struct Common {
    /// Flat key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override one configuration key; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

impl Common {
    fn load(&self, default_out: &str) -> Result<(ExperimentConfig, PathBuf), Error> {
        let base = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        let cfg = base.with_overrides(&self.sets)?;
        let out = self
            .out
            .clone()
            .or_else(|| cfg.out.clone())
            .unwrap_or_else(|| PathBuf::from(default_out));
        Ok((cfg, out))
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Riemann(c) => {
            let (cfg, out) = c.load("out/riemann")?;
            let row = harness::cmd_riemann(&cfg, Some(&out))?;
            println!("{}\n{}", RiemannRow::HEADER, row.csv_line());
        }
        Command::Profile(c) => {
            let (cfg, out) = c.load("out/profile")?;
            harness::cmd_profile(&cfg, Some(&out))?;
            print!("{}", std::fs::read_to_string(out.join("report.txt"))?);
        }
        Command::Stability(c) => {
            let (cfg, out) = c.load("out/stability")?;
            harness::cmd_stability(&cfg, Some(&out))?;
            print!("{}", std::fs::read_to_string(out.join("report.txt"))?);
        }
        Command::RelaxationLimit(c) => {
            let (cfg, out) = c.load("out/relaxation-limit")?;
            let rows = harness::cmd_relaxation_limit(&cfg, Some(&out))?;
            println!("{}", RelaxationRow::HEADER);
            for r in &rows {
                println!(
                    "{},{},{},{}",
                    harness::fmt(r.tau),
                    harness::fmt(r.distance),
                    harness::fmt(r.stress_residual),
                    r.steps
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
