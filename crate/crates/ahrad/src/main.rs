use std::path::PathBuf;
use std::process::ExitCode;

use ahrad::config::{Experiment, RunConfig};
use ahrad::error::{io_at, Error};
use ahrad::run::{execute, output_root};
use clap::Parser;

/// Radiation fields and scattering on warped asymptotically hyperbolic models.
#[derive(Parser, Debug)]
#[command(name = "ahrad", version)]
struct Cli {
    /// Pipeline to run.
    #[arg(value_enum)]
    experiment: Experiment,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Re-run even if a run with the same config hash exists.
    #[arg(long)]
    force: bool,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

const EXIT_CHECKS_FAILED: u8 = 1;
const EXIT_ERROR: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECKS_FAILED),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn run(cli: &Cli) -> Result<bool, Error> {
    if let Some(n) = cli.jobs {
        if n == 0 {
            return Err(Error::Precondition("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
    }
    let text = std::fs::read_to_string(&cli.config).map_err(io_at(&cli.config))?;
    let cfg = RunConfig::from_json(&text)?;
    let root = output_root(&cfg);
    let report = execute(cli.experiment, &cfg, &root, cli.force)?;
    let m = &report.manifest;
    if report.reused {
        println!("{}: up to date ({})", cli.experiment.name(), report.dir.display());
    } else {
        println!("{}: {} ({:.2} s)", cli.experiment.name(), report.dir.display(), m.wall_time_s);
    }
    for c in &m.checks {
        let value = c.value.map_or("nan".to_string(), |v| format!("{v:.3e}"));
        let mark = if c.passed { "PASS" } else { "FAIL" };
        println!("  {mark} {} = {value} {} {:.3e}", c.name, c.relation, c.limit);
    }
    Ok(report.passed())
}
