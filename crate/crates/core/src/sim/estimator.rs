use nalgebra::{UnitQuaternion, Vector3};

use crate::sim::{LowPass, PoseMeasurement, SensorSample, VehicleState};

/// IMU low-pass cutoff, Hz.
pub const IMU_CUTOFF_HZ: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorMode {
    /// Outputs the true state.
    Perfect,
    /// Complementary attitude filter plus constant-gain position observer.
    Complementary,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
    /// Body-to-world rotation.
    pub attitude: UnitQuaternion<f64>,
    pub rate: Vector3<f64>,
}

impl Estimate {
    pub fn from_truth(state: &VehicleState) -> Self {
        Self {
            position: state.position,
            velocity: state.velocity,
            attitude: state.attitude,
            rate: state.rate,
        }
    }
}

/// Blend gains applied on each pose fix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObserverGains {
    pub attitude: f64,
    pub position: f64,
    /// Velocity correction per metre of position innovation, 1/s.
    pub velocity: f64,
}

impl Default for ObserverGains {
    fn default() -> Self {
        Self { attitude: 0.05, position: 0.2, velocity: 2.0 }
    }
}

#[derive(Debug, Clone)]
pub struct Estimator {
    mode: EstimatorMode,
    gains: ObserverGains,
    gravity: Vector3<f64>,
    gyro_filter: LowPass,
    accel_filter: LowPass,
    current: Option<Estimate>,
}

impl Estimator {
    pub fn new(mode: EstimatorMode, gravity: Vector3<f64>) -> Self {
        Self::with_gains(mode, gravity, ObserverGains::default())
    }

    pub fn with_gains(mode: EstimatorMode, gravity: Vector3<f64>, gains: ObserverGains) -> Self {
        Self {
            mode,
            gains,
            gravity,
            gyro_filter: LowPass::new(IMU_CUTOFF_HZ),
            accel_filter: LowPass::new(IMU_CUTOFF_HZ),
            current: None,
        }
    }

    pub fn mode(&self) -> EstimatorMode {
        self.mode
    }

    /// Consumes one sensor sample taken `dt` after the previous IMU sample.
    pub fn update(&mut self, sample: &SensorSample, dt: f64) {
        if self.mode == EstimatorMode::Perfect {
            return;
        }
        let gyro = self.gyro_filter.step(sample.gyro, dt);
        let accel = self.accel_filter.step(sample.accel, dt);
        if let Some(est) = self.current.as_mut() {
            est.attitude *= UnitQuaternion::from_scaled_axis(gyro * dt);
            let acc_world = est.attitude * accel + self.gravity;
            est.velocity += acc_world * dt;
            est.position += est.velocity * dt;
            est.rate = gyro;
        }
        if let Some(pose) = sample.pose {
            self.correct(&pose, gyro);
        }
    }

    fn correct(&mut self, pose: &PoseMeasurement, gyro: Vector3<f64>) {
        let g = self.gains;
        match self.current.as_mut() {
            None => {
                self.current = Some(Estimate {
                    position: pose.position,
                    velocity: Vector3::zeros(),
                    attitude: pose.attitude,
                    rate: gyro,
                });
            }
            Some(est) => {
                let innovation = pose.position - est.position;
                est.position += innovation * g.position;
                est.velocity += innovation * g.velocity;
                let delta = est.attitude.inverse() * pose.attitude;
                est.attitude *= UnitQuaternion::from_scaled_axis(delta.scaled_axis() * g.attitude);
            }
        }
    }

    /// Current estimate. Before the first pose fix, and in perfect mode, this is the truth.
    pub fn estimate(&self, truth: &VehicleState) -> Estimate {
        match (self.mode, self.current) {
            (EstimatorMode::Complementary, Some(est)) => est,
            _ => Estimate::from_truth(truth),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::VehicleParams;
    use crate::sim::{applied_wrench, DisturbanceSpec, SensorModel};

    fn run_static(spec: DisturbanceSpec, pose_until: f64, seconds: f64) -> (VehicleState, Estimator) {
        let p = VehicleParams::default();
        let truth = VehicleState::hover(Vector3::new(0.4, -0.2, 1.5), 0.5, &p);
        let wrench = applied_wrench(&truth, &p, &DisturbanceSpec::none()).unwrap();
        let mut sensors = SensorModel::new(spec);
        let mut est = Estimator::new(EstimatorMode::Complementary, p.gravity_world());
        let dt = 1e-3;
        let n = (seconds / dt).round() as usize;
        for k in 0..n {
            let t = k as f64 * dt;
            let with_pose = k % 10 == 0 && t < pose_until;
            let sample = sensors.sense(t, &truth, &wrench, &p, with_pose);
            est.update(&sample, dt);
        }
        (truth, est)
    }

    #[test]
    fn noiseless_static_estimate_matches_truth() {
        let (truth, est) = run_static(DisturbanceSpec::none(), f64::INFINITY, 1.0);
        let e = est.estimate(&truth);
        assert!((e.position - truth.position).norm() < 1e-6);
        assert!(e.velocity.norm() < 1e-6);
        assert!(e.attitude.angle_to(&truth.attitude) < 1e-6);
        assert!(e.rate.norm() < 1e-6);
    }

    #[test]
    fn pose_dropout_drift_bounded_by_bias_integral() {
        let bias = Vector3::new(0.01, -0.02, 0.005);
        let spec = DisturbanceSpec { gyro_bias: bias, ..DisturbanceSpec::none() };
        let (truth, before) = run_static(spec, f64::INFINITY, 1.0);
        let (_, after) = run_static(spec, 1.0, 3.0);
        let drift = after.estimate(&truth).attitude.angle_to(&before.estimate(&truth).attitude);
        let bound = bias.norm() * 2.0;
        assert!(drift > 0.0);
        assert!(drift <= bound * 1.01, "drift {drift} exceeds {bound}");
    }

    #[test]
    fn perfect_mode_passes_truth_through() {
        let p = VehicleParams::default();
        let mut truth = VehicleState::hover(Vector3::new(1.0, 2.0, 3.0), 0.1, &p);
        truth.velocity = Vector3::new(0.3, 0.0, -0.1);
        truth.rate = Vector3::new(0.2, 0.1, 0.0);
        let mut est = Estimator::new(EstimatorMode::Perfect, p.gravity_world());
        let wrench = applied_wrench(&truth, &p, &DisturbanceSpec::none()).unwrap();
        let mut sensors = SensorModel::new(DisturbanceSpec::default());
        let sample = sensors.sense(0.0, &truth, &wrench, &p, true);
        est.update(&sample, 1e-3);
        assert_eq!(est.estimate(&truth), Estimate::from_truth(&truth));
    }
}
