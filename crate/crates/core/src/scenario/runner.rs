use std::thread;

use crate::control::Cascade;
use crate::error::{Error, Result};
use crate::scenario::{metrics, reference, LogRow, Metrics, ScenarioLog, SimConfig};
use crate::sim::{applied_wrench, step, Estimator, EstimatorMode, SensorModel, VehicleState};

/// Position magnitude beyond which a run counts as diverged, m.
pub const DIVERGENCE_RANGE: f64 = 1e3;
/// Body rate beyond which a run counts as diverged, rad/s.
pub const DIVERGENCE_RATE: f64 = 1e3;

/// Runs one scenario to completion.
///
/// The vehicle starts trimmed in hover at the initial reference, displaced by
/// `start_offset`. Physics,
/// sensors, estimator and controller all advance on the physics clock; a row is
/// logged every `1 / log_hz` seconds before the step that follows it.
pub fn run_scenario(config: &SimConfig) -> Result<(ScenarioLog, Metrics)> {
    config.validate()?;
    let params = config.vehicle;
    let [imu_div, pose_div, log_div] = config.sample_dividers()?;
    let dt = 1.0 / config.rates.physics_hz;
    let imu_dt = imu_div as f64 * dt;
    let ticks = (config.scenario.duration * config.rates.physics_hz).round() as u64;

    let start = reference(0.0, &config.scenario)?;
    let mut state = VehicleState::hover(start.position + config.start_offset, start.heading, &params);
    let mut cascade = Cascade::new(params, config.gains, config.rates)?;
    let mut estimator = Estimator::new(config.estimator, params.gravity_world());
    let mut sensors = SensorModel::new(config.disturbance);

    let mut rows = Vec::with_capacity((ticks / log_div) as usize);
    for tick in 0..ticks {
        let t = tick as f64 * dt;
        let setpoint = reference(t.min(config.scenario.duration), &config.scenario)?;
        if config.estimator == EstimatorMode::Complementary && tick % imu_div == 0 {
            let wrench = applied_wrench(&state, &params, &config.disturbance)
                .map_err(|_| Error::SimulationDiverged { time: t })?;
            let sample = sensors.sense(t, &state, &wrench, &params, tick % pose_div == 0);
            estimator.update(&sample, imu_dt);
        }
        let estimate = estimator.estimate(&state);
        let command = cascade.update(tick, &estimate, &setpoint).map_err(|e| match e {
            Error::InfeasibleRoll { .. } | Error::Domain(_) => Error::SimulationDiverged { time: t },
            other => other,
        })?;
        if tick % log_div == 0 {
            let out = cascade.outputs();
            rows.push(LogRow {
                time: t,
                reference: setpoint,
                truth: state,
                estimate,
                force_des: out.force_des,
                rate_des: out.rate_des,
                torque_des: out.torque_des,
                thrust_per_motor: out.thrust_per_motor,
                command,
                flags: out.flags,
            });
        }
        state = step(&state, &command, dt, &params, &config.disturbance).map_err(|e| match e {
            Error::SimulationDiverged { .. } => Error::SimulationDiverged { time: t },
            other => other,
        })?;
        if state.position.norm() > DIVERGENCE_RANGE || state.rate.norm() > DIVERGENCE_RATE {
            return Err(Error::SimulationDiverged { time: t + dt });
        }
    }

    let log = ScenarioLog { log_dt: log_div as f64 * dt, transient_s: config.transient_s, rows };
    let m = metrics(&log)?;
    Ok((log, m))
}

/// Runs independent scenarios on worker threads; results keep the input order.
pub fn run_sweep(configs: &[SimConfig], workers: usize) -> Vec<Result<(ScenarioLog, Metrics)>> {
    let workers = workers.clamp(1, configs.len().max(1));
    let mut results: Vec<Option<Result<(ScenarioLog, Metrics)>>> = (0..configs.len()).map(|_| None).collect();
    thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                scope.spawn(move || {
                    (w..configs.len()).step_by(workers).map(|i| (i, run_scenario(&configs[i]))).collect::<Vec<_>>()
                })
            })
            .collect();
        for handle in handles {
            for (i, result) in handle.join().expect("scenario worker panicked") {
                results[i] = Some(result);
            }
        }
    });
    results.into_iter().map(|r| r.expect("every index assigned")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Scenario;

    fn short(mut s: Scenario, seconds: f64) -> SimConfig {
        s.duration = seconds;
        SimConfig { transient_s: 1.0, ..SimConfig::ideal(s) }
    }

    #[test]
    fn row_count_and_spacing() {
        let (log, _) = run_scenario(&short(Scenario::hover(), 3.0)).unwrap();
        assert_eq!(log.rows.len(), 300);
        for w in log.rows.windows(2) {
            assert!(w[1].time > w[0].time);
        }
        assert_eq!(log.rows[0].time, 0.0);
    }

    #[test]
    fn invalid_config_lists_issues() {
        let mut c = short(Scenario::hover(), 3.0);
        c.vehicle.mass = -1.0;
        c.log_hz = 300.0;
        match run_scenario(&c) {
            Err(Error::Config(issues)) => assert_eq!(issues.len(), 2, "{issues:?}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn divergence_reports_time() {
        let mut c = short(Scenario::hover(), 3.0);
        c.disturbance.force_offset.z = 1e5;
        match run_scenario(&c) {
            Err(Error::SimulationDiverged { time }) => assert!(time.is_finite() && time < 3.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sweep_matches_serial() {
        let configs = vec![short(Scenario::hover(), 2.0), short(Scenario::circle(), 2.0), short(Scenario::star(), 2.0)];
        let parallel = run_sweep(&configs, 3);
        for (c, r) in configs.iter().zip(parallel) {
            assert_eq!(r.unwrap(), run_scenario(c).unwrap());
        }
    }
}
