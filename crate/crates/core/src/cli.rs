//! Command-line entry point.
//!
//! Exit codes: 0 success, 1 validation failure, 2 runtime or no-fit error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::error::Error;
use crate::report::{write_report, write_sweep_report, write_trace, ReportFormat};
use crate::scenario::{parse_scenario, Scenario};
use crate::sim::{run, RunOutput};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "pipediff",
    version,
    about = "Simulate a three-track in-pipe robot driven by a three-output differential"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => ReportFormat::Text,
            Format::Json => ReportFormat::Json,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a scenario file and print diagnostics.
    Validate { scenario: PathBuf },
    /// Run one simulation.
    Run {
        scenario: PathBuf,
        /// Write the trace CSV here.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the report here instead of standard output.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Disturbance seed, overriding the scenario.
        #[arg(long, env = "PIPEDIFF_SEED")]
        seed: Option<u64>,
        /// Roll orientation in degrees, overriding the scenario.
        #[arg(long, allow_negative_numbers = true)]
        theta: Option<f64>,
    },
    /// Run the scenario at K evenly spaced roll orientations.
    Sweep {
        scenario: PathBuf,
        #[arg(long)]
        theta_steps: usize,
        /// Directory receiving one trace CSV per orientation.
        #[arg(long)]
        trace_dir: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long, env = "PIPEDIFF_SEED")]
        seed: Option<u64>,
    },
}

/// Failure carrying the exit code it maps to.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn runtime(e: impl ToString) -> Self {
        Self {
            code: EXIT_RUNTIME,
            message: e.to_string(),
        }
    }
}

fn load(path: &Path) -> Result<Scenario, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::runtime(Error::io(path, e)))?;
    parse_scenario(&text).map_err(|errors| Failure {
        code: EXIT_INVALID,
        message: errors
            .iter()
            .map(|e| format!("{}: {e}", path.display()))
            .collect::<Vec<_>>()
            .join("\n"),
    })
}

fn simulate(scenario: &Scenario, seed: Option<u64>, theta_deg: Option<f64>) -> Result<RunOutput, Failure> {
    let mut settings = scenario.sim;
    if let Some(s) = seed {
        settings.seed = s;
    }
    if let Some(t) = theta_deg {
        settings.theta_deg = t;
    }
    run(&scenario.network, &scenario.robot, &scenario.gear, &settings.params()).map_err(|e| {
        let code = match e {
            Error::InvalidScenario(_) | Error::InvalidArgument(_) => EXIT_INVALID,
            _ => EXIT_RUNTIME,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    })
}

fn emit(text: &str, path: Option<&Path>) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::runtime(Error::io(p, e))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Validate { scenario } => {
            let sc = load(&scenario)?;
            println!(
                "{}: ok ({} segments)",
                scenario.display(),
                sc.network.segments.len()
            );
            Ok(())
        }
        Command::Run {
            scenario,
            trace,
            report,
            format,
            seed,
            theta,
        } => {
            let sc = load(&scenario)?;
            let out = simulate(&sc, seed, theta)?;
            if let Some(path) = &trace {
                write_trace(&out.trace, path).map_err(Failure::runtime)?;
            }
            emit(
                &write_report(&out.summary, format.into(), &sc.report),
                report.as_deref(),
            )?;
            match out.error {
                Some(e) => Err(Failure::runtime(e)),
                None => Ok(()),
            }
        }
        Command::Sweep {
            scenario,
            theta_steps,
            trace_dir,
            report,
            format,
            seed,
        } => {
            if theta_steps == 0 {
                return Err(Failure {
                    code: EXIT_INVALID,
                    message: "--theta-steps must be at least 1".into(),
                });
            }
            let sc = load(&scenario)?;
            let thetas: Vec<f64> = (0..theta_steps)
                .map(|k| 360.0 * k as f64 / theta_steps as f64)
                .collect();
            let outputs = thetas
                .par_iter()
                .map(|&t| simulate(&sc, seed, Some(t)))
                .collect::<Result<Vec<_>, _>>()?;
            if let Some(dir) = &trace_dir {
                fs::create_dir_all(dir).map_err(|e| Failure::runtime(Error::io(dir, e)))?;
                for (k, out) in outputs.iter().enumerate() {
                    write_trace(&out.trace, &dir.join(format!("trace_{k:03}.csv")))
                        .map_err(Failure::runtime)?;
                }
            }
            let summaries: Vec<_> = outputs.iter().map(|o| o.summary.clone()).collect();
            emit(&write_sweep_report(&summaries, format.into()), report.as_deref())?;
            match outputs.into_iter().find_map(|o| o.error) {
                Some(e) => Err(Failure::runtime(e)),
                None => Ok(()),
            }
        }
    }
}

/// Parses `args` (including the program name) and runs the command, returning the exit code.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_RUNTIME } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
