//! Command-line front end: scenario runs, parameter identification, config checks.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tailsitter::error::ConfigIssue;
use tailsitter::scenario::{run_scenario, Scenario, SimConfig};
use tailsitter::sim::EstimatorMode;
use tailsitter::sysid::{self, FitOptions, SynthNoise};
use tailsitter::{Error, Result};

#[derive(Parser)]
#[command(name = "tailsitter", version, about = "Tail-sitter simulation, control and identification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a closed-loop scenario and write its log and metrics.
    Run {
        #[arg(long, value_enum)]
        scenario: Option<ScenarioArg>,
        /// Seconds; defaults to the scenario's own duration.
        #[arg(long)]
        duration: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Configuration file; built-in defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        estimator: Option<EstimatorArg>,
        /// CSV log destination.
        #[arg(long)]
        out_log: Option<PathBuf>,
        /// JSON metrics destination; stdout when omitted.
        #[arg(long)]
        out_metrics: Option<PathBuf>,
    },
    /// Static-test parameter identification.
    Sysid {
        #[command(subcommand)]
        command: SysidCommand,
    },
    /// Check a configuration file without running anything.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Subcommand)]
enum SysidCommand {
    /// Fit the aerodynamic constants to a CSV of load-cell records.
    Fit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also fit a constant offset per channel (diagnostic).
        #[arg(long)]
        intercept: bool,
        /// Write a complete configuration: this file with the fitted constants substituted.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Generate synthetic load-cell records from the default constants.
    Synth {
        #[arg(long)]
        out: PathBuf,
        /// Relative standard deviation of the multiplicative noise.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Take the constants from this configuration instead of the defaults.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioArg {
    Hover,
    Waypoint,
    Circle,
    Star,
}

#[derive(Clone, Copy, ValueEnum)]
enum EstimatorArg {
    Perfect,
    Complementary,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn load_config(path: Option<&Path>) -> Result<SimConfig> {
    match path {
        Some(p) => SimConfig::load(p),
        None => Ok(SimConfig::default()),
    }
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Run { scenario, duration, seed, config, estimator, out_log, out_metrics } => {
            let mut cfg = load_config(config.as_deref())?;
            if let Some(s) = scenario {
                let name = match s {
                    ScenarioArg::Hover => "hover",
                    ScenarioArg::Waypoint => "waypoint",
                    ScenarioArg::Circle => "circle",
                    ScenarioArg::Star => "star",
                };
                cfg.scenario = Scenario::by_name(name).expect("known scenario");
            }
            if let Some(d) = duration {
                cfg.scenario.duration = d;
            }
            if let Some(s) = seed {
                cfg.disturbance.seed = s;
            }
            if let Some(e) = estimator {
                cfg.estimator = match e {
                    EstimatorArg::Perfect => EstimatorMode::Perfect,
                    EstimatorArg::Complementary => EstimatorMode::Complementary,
                };
            }
            let (log, metrics) = run_scenario(&cfg)?;
            if let Some(path) = out_log {
                let mut w = create(&path)?;
                log.write_csv(&mut w)?;
                w.flush()?;
            }
            let json = metrics.to_json()?;
            match out_metrics {
                Some(path) => std::fs::write(path, json + "\n")?,
                None => println!("{json}"),
            }
            Ok(())
        }
        Command::Sysid { command: SysidCommand::Fit { input, out, intercept, config } } => {
            let records = sysid::read_records(BufReader::new(File::open(&input)?))?;
            let fit = sysid::fit_params_with(&records, FitOptions { intercept })?;
            let text = match config {
                Some(path) => {
                    let mut cfg = SimConfig::load(path)?;
                    cfg.vehicle = fit.apply_to(&cfg.vehicle)?;
                    cfg.to_file_string()
                }
                None => fit.to_param_file(),
            };
            std::fs::write(&out, text)?;
            eprintln!("fitted {} constants from {} records", fit.fits.len(), records.len());
            Ok(())
        }
        Command::Sysid { command: SysidCommand::Synth { out, noise, seed, config } } => {
            let params = load_config(config.as_deref())?.vehicle;
            let (omega, delta) = sysid::default_grids();
            let records = sysid::generate_synthetic(&params, &omega, &delta, SynthNoise { relative: noise }, seed)?;
            let mut w = create(&out)?;
            sysid::write_records(&records, &mut w)?;
            w.flush()?;
            Ok(())
        }
        Command::Validate { config } => {
            SimConfig::load(config)?;
            println!("{{\"valid\":true}}");
            Ok(())
        }
    }
}

fn report(err: &Error) {
    let issues: Vec<serde_json::Value> = match err {
        Error::Config(list) => list
            .iter()
            .map(|i| match i {
                ConfigIssue::Missing(k) => serde_json::json!({"kind": "missing", "key": k}),
                ConfigIssue::Unknown(k) => serde_json::json!({"kind": "unknown", "key": k}),
                ConfigIssue::Invalid { key, reason } => {
                    serde_json::json!({"kind": "invalid", "key": key, "reason": reason})
                }
            })
            .collect(),
        _ => Vec::new(),
    };
    let mut body = serde_json::json!({"error": err.category(), "message": err.to_string()});
    if !issues.is_empty() {
        body["issues"] = issues.into();
    }
    eprintln!("{body}");
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors.
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report(&e);
            ExitCode::from(1)
        }
    }
}
