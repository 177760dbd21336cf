use nalgebra::Vector3;
use proptest::prelude::*;
use tailsitter::scenario::{metrics, reference, run_scenario, Metrics, Scenario, ScenarioKind, SimConfig, YawProfile};
use tailsitter::sim::EstimatorMode;

fn close(a: f64, b: f64, rel: f64, abs: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()) + abs
}

fn assert_metrics_close(a: &Metrics, b: &Metrics) {
    let pairs = [
        (a.rms_x_m, b.rms_x_m),
        (a.rms_y_m, b.rms_y_m),
        (a.rms_z_m, b.rms_z_m),
        (a.peak_err_x_m, b.peak_err_x_m),
        (a.peak_err_y_m, b.peak_err_y_m),
        (a.peak_err_z_m, b.peak_err_z_m),
        (a.peak_pitch_rad, b.peak_pitch_rad),
        (a.peak_speed_mps, b.peak_speed_mps),
        (a.latency_s, b.latency_s),
    ];
    for (i, (x, y)) in pairs.into_iter().enumerate() {
        // Absolute floor for quantities at round-off level.
        assert!(close(x, y, 0.01, 1e-9), "field {i}: {x} vs {y}\n{a:?}\n{b:?}");
    }
}

#[test]
fn metrics_invariant_to_log_rate_doubling() {
    for scenario in [Scenario::waypoint(), Scenario::circle(), Scenario::star()] {
        let base = SimConfig::ideal(scenario);
        let doubled = SimConfig { log_hz: 2.0 * base.log_hz, ..base.clone() };
        let (la, ma) = run_scenario(&base).unwrap();
        let (lb, mb) = run_scenario(&doubled).unwrap();
        assert_eq!(lb.rows.len(), 2 * la.rows.len());
        assert_metrics_close(&ma, &mb);
    }
}

#[test]
fn noisy_hover_metrics_invariant_to_log_rate_doubling() {
    let base = SimConfig { scenario: Scenario { duration: 20.0, ..Scenario::hover() }, ..SimConfig::default() };
    let doubled = SimConfig { log_hz: 200.0, ..base.clone() };
    let (_, ma) = run_scenario(&base).unwrap();
    let (_, mb) = run_scenario(&doubled).unwrap();
    for (x, y) in ma.rms().iter().zip(mb.rms()) {
        assert!(close(*x, y, 0.01, 0.0), "{ma:?} {mb:?}");
    }
}

#[test]
fn metrics_invariants_hold() {
    for scenario in [Scenario::hover(), Scenario::waypoint(), Scenario::circle(), Scenario::star()] {
        let mut c = SimConfig { scenario, ..SimConfig::default() };
        c.scenario.duration = c.scenario.duration.min(20.0);
        let (log, m) = run_scenario(&c).unwrap();
        assert_eq!(metrics(&log).unwrap(), m);
        let rms = m.rms();
        let peak = [m.peak_err_x_m, m.peak_err_y_m, m.peak_err_z_m];
        for k in 0..3 {
            assert!(rms[k] >= 0.0 && rms[k] <= peak[k]);
        }
        assert!(m.peak_pitch_rad >= 0.0 && m.peak_speed_mps >= 0.0 && m.latency_s >= 0.0);
    }
}

#[test]
fn log_timestamps_and_row_count() {
    for (hz, duration) in [(100.0, 7.0), (250.0, 6.0), (50.0, 8.0)] {
        let mut c = SimConfig::ideal(Scenario::star());
        c.log_hz = hz;
        c.scenario.duration = duration;
        let (log, _) = run_scenario(&c).unwrap();
        assert_eq!(log.rows.len(), (duration * hz) as usize);
        assert!(log.rows.windows(2).all(|w| w[1].time > w[0].time));
    }
}

#[test]
fn complementary_estimate_stays_close_to_truth() {
    let c = SimConfig { scenario: Scenario { duration: 15.0, ..Scenario::waypoint() }, ..SimConfig::default() };
    assert_eq!(c.estimator, EstimatorMode::Complementary);
    let (log, _) = run_scenario(&c).unwrap();
    for row in &log.rows {
        assert!((row.estimate.position - row.truth.position).norm() < 0.02, "t {}", row.time);
        assert!(row.estimate.attitude.angle_to(&row.truth.attitude) < 0.02, "t {}", row.time);
    }
}

#[test]
fn constant_wind_force_is_rejected_by_the_loop() {
    let mut c = SimConfig::ideal(Scenario { duration: 30.0, ..Scenario::hover() });
    c.disturbance.force_offset = Vector3::new(0.3, -0.2, 0.0);
    let (log, _) = run_scenario(&c).unwrap();
    let last = log.rows.last().unwrap();
    // Proportional position loop: steady offset f / (m ω_n²).
    let expected = Vector3::new(0.3, -0.2, 0.0) / (0.65 * 4.0);
    assert!((last.error() - expected).norm() < 5e-3, "{:?}", last.error());
}

fn scenario_strategy() -> impl Strategy<Value = Scenario> {
    let circle = (0.3f64..3.0, 0.2f64..2.5).prop_map(|(radius, speed)| Scenario {
        kind: ScenarioKind::Circle { center: Vector3::new(0.0, 0.0, 1.0), radius, speed },
        duration: 15.0,
        yaw: YawProfile::FollowVelocity,
    });
    let waypoint = (prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0, 0.5f64..2.5), 1..5), 0.2f64..2.0, 0.2f64..3.0, 0.0f64..2.0)
        .prop_map(|(pts, max_speed, max_accel, dwell)| Scenario {
            kind: ScenarioKind::Waypoint {
                waypoints: pts.into_iter().map(|(x, y, z)| Vector3::new(x, y, z)).collect(),
                max_speed,
                max_accel,
                dwell,
            },
            duration: 30.0,
            yaw: YawProfile::Constant(0.0),
        });
    let star = (0.5f64..2.5, 0.2f64..2.0, 0.2f64..3.0, prop::sample::select(vec![5usize, 7, 9])).prop_map(
        |(circumradius, speed, max_accel, vertices)| Scenario {
            kind: ScenarioKind::Star { center: Vector3::zeros(), vertices, circumradius, speed, max_accel, dwell: 0.5 },
            duration: 40.0,
            yaw: YawProfile::Constant(1.0),
        },
    );
    prop_oneof![circle, waypoint, star]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn references_continuous_and_speed_bounded(s in scenario_strategy(), t in 0.0f64..1.0) {
        let cap = s.speed_limit();
        let h = 1e-3;
        let t = t * (s.duration - h);
        let a = reference(t, &s).unwrap();
        let b = reference(t + h, &s).unwrap();
        prop_assert!(a.velocity.norm() <= cap * (1.0 + 1e-12));
        prop_assert!((b.position - a.position).norm() <= cap * h * (1.0 + 1e-9));
        prop_assert!(a.heading > -std::f64::consts::PI && a.heading <= std::f64::consts::PI);
    }

    #[test]
    fn reference_velocity_is_position_derivative(s in scenario_strategy(), t in 0.01f64..0.99) {
        let h = 1e-6;
        let t = t * s.duration;
        let a = reference(t - h, &s).unwrap();
        let b = reference(t + h, &s).unwrap();
        let mid = reference(t, &s).unwrap();
        let fd = (b.position - a.position) / (2.0 * h);
        // Accelerations are bounded, so central differences agree to O(a·h).
        prop_assert!((fd - mid.velocity).norm() < 1e-4, "{fd:?} vs {:?}", mid.velocity);
    }
}
