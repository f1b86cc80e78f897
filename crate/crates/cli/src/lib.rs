//! Config-driven experiment runner for `unionavg`.
//!
//! ```text
//! unionavg run <config>      run one experiment and write its trace
//! unionavg verify <config>   run the oracle suite against an experiment
//! unionavg sweep <config>    run a grid of starting points
//! ```
//!
//! `<config>` is a TOML file or `preset:NAME` for a built-in experiment.

pub mod catalog;
pub mod config;
pub mod error;
pub mod experiment;
pub mod presets;
pub mod sweep;
pub mod trace;
pub mod verify;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::ExperimentConfig;
pub use error::{exit, CliError};
pub use experiment::Experiment;

#[derive(Debug, Parser)]
#[command(name = "unionavg", version, about = "Run union averaged operator experiments")]
pub struct Cli {
    /// Override the experiment seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Override the iteration budget.
    #[arg(long, global = true)]
    pub max_iters: Option<usize>,
    /// Override the output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Only report errors.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one experiment and write its trace.
    Run { config: String },
    /// Run the oracle suite against an experiment.
    Verify { config: String },
    /// Run a grid of starting points and count basins.
    Sweep { config: String },
}

impl Cli {
    fn config(&self) -> &str {
        match &self.command {
            Command::Run { config } | Command::Verify { config } | Command::Sweep { config } => config,
        }
    }

    /// Loads the config and applies command-line overrides.
    pub fn experiment(&self) -> Result<Experiment, CliError> {
        let mut cfg = ExperimentConfig::load(self.config())?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(n) = self.max_iters {
            cfg.stop.max_iters = n;
        }
        if let Some(dir) = &self.out {
            cfg.output.dir = dir.clone();
        }
        Experiment::new(cfg).map_err(|e| e.context(self.config()))
    }
}

fn write_json<T: serde::Serialize>(path: &std::path::Path, value: &T) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "{}", trace::to_line(value))?;
    Ok(())
}

fn execute_inner(cli: &Cli) -> Result<i32, CliError> {
    let exp = cli.experiment()?;
    let dir = exp.config.output.dir.clone();
    let name = exp.config.name.clone();
    match cli.command {
        Command::Run { .. } => {
            let path = exp.config.trace_path();
            let summary = exp.run_to(&exp.x0()?, &path)?;
            if !cli.quiet {
                println!(
                    "{name}: {} after {} iterations, {} ({})",
                    summary.status,
                    summary.iterations,
                    summary.classification.class,
                    path.display()
                );
            }
            Ok(summary.exit_code)
        }
        Command::Verify { .. } => {
            let summary = exp.run_to(&exp.x0()?, &exp.config.trace_path())?;
            let report = verify::verify(&exp, &summary)?;
            let path = dir.join(format!("{name}.verify.json"));
            write_json(&path, &report)?;
            if !cli.quiet {
                let i = &report.inequality;
                println!(
                    "inequality: alpha={} pairs={} max_violation={:e} violations={}",
                    i.alpha, i.pairs, i.max_violation, i.violations
                );
                let c = &report.classification;
                println!("classification: run={} oracle={}", c.summary_class, c.oracle_class);
                if let Some(r) = &report.radius {
                    println!("attraction radius (sampled): {:e}", r.radius);
                }
                for p in &report.prox {
                    match (&p.skipped, p.distance) {
                        (Some(why), _) => println!("grid prox: skipped ({why})"),
                        (None, Some(d)) => println!("grid prox: distance={d:e} cell={:e}", p.cell_diameter),
                        (None, None) => {}
                    }
                }
                println!("{name}: {} ({})", if report.passed { "PASS" } else { "FAIL" }, path.display());
            }
            Ok(if report.passed { exit::CONVERGED } else { exit::VERIFY_FAILED })
        }
        Command::Sweep { .. } => {
            let summary = sweep::sweep(&exp, &dir.join(format!("{name}.sweep")))?;
            let path = dir.join(format!("{name}.sweep.json"));
            write_json(&path, &summary)?;
            if !cli.quiet {
                println!(
                    "{name}: {} runs, {} converged, {} max-iters, {} diverged",
                    summary.runs, summary.converged, summary.max_iters, summary.diverged
                );
                for b in &summary.basins {
                    println!("  {:?} {}: {}", b.representative.as_slice(), b.class, b.count);
                }
            }
            Ok(exit::CONVERGED)
        }
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn execute(cli: &Cli) -> i32 {
    match execute_inner(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
