//! Reference trajectories, closed-loop scenario runs, metrics and configuration.

mod config;
mod log;
mod metrics;
mod reference;
mod runner;

pub use config::{estimator_name, parse_estimator, SimConfig, HARNESS_KEYS, REQUIRED_KEYS};
pub use log::{LogRow, ScenarioLog, LOG_COLUMNS};
pub use metrics::{delay, metrics, Metrics};
pub use reference::{reference, Scenario, ScenarioKind, YawProfile};
pub use runner::{run_scenario, run_sweep, DIVERGENCE_RANGE, DIVERGENCE_RATE};
