use nalgebra::{UnitQuaternion, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::model::Wrench;
use crate::params::VehicleParams;
use crate::sim::VehicleState;

/// Constant disturbance offsets, sensor noise levels and the random seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisturbanceSpec {
    /// Constant world-frame force, N.
    pub force_offset: Vector3<f64>,
    /// Constant body-frame torque, N·m.
    pub torque_offset: Vector3<f64>,
    /// Constant gyro bias, rad/s.
    pub gyro_bias: Vector3<f64>,
    /// White-noise standard deviations.
    pub gyro_std: f64,
    pub accel_std: f64,
    pub pose_pos_std: f64,
    pub pose_att_std: f64,
    pub seed: u64,
}

impl Default for DisturbanceSpec {
    /// Nominal noise levels of an IMU plus motion-capture setup.
    fn default() -> Self {
        Self {
            force_offset: Vector3::zeros(),
            torque_offset: Vector3::zeros(),
            gyro_bias: Vector3::zeros(),
            gyro_std: 0.005,
            accel_std: 0.05,
            pose_pos_std: 1e-3,
            pose_att_std: 0.1f64.to_radians(),
            seed: 0,
        }
    }
}

impl DisturbanceSpec {
    /// No offsets and no noise.
    pub fn none() -> Self {
        Self {
            gyro_std: 0.0,
            accel_std: 0.0,
            pose_pos_std: 0.0,
            pose_att_std: 0.0,
            ..Self::default()
        }
    }
}

/// External pose fix, e.g. from motion capture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoseMeasurement {
    pub position: Vector3<f64>,
    pub attitude: UnitQuaternion<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorSample {
    pub time: f64,
    /// Body angular rate, rad/s.
    pub gyro: Vector3<f64>,
    /// Body specific force, m/s².
    pub accel: Vector3<f64>,
    /// Present only on ticks where the pose source reports.
    pub pose: Option<PoseMeasurement>,
}

/// Seeded IMU and pose sensor models.
#[derive(Debug, Clone)]
pub struct SensorModel {
    spec: DisturbanceSpec,
    rng: ChaCha8Rng,
}

impl SensorModel {
    pub fn new(spec: DisturbanceSpec) -> Self {
        Self { spec, rng: ChaCha8Rng::seed_from_u64(spec.seed) }
    }

    fn noise3(&mut self, std: f64) -> Vector3<f64> {
        if std == 0.0 {
            return Vector3::zeros();
        }
        let mut draw = || -> f64 { StandardNormal.sample(&mut self.rng) };
        Vector3::new(draw(), draw(), draw()) * std
    }

    /// Samples the IMU and, when `with_pose` is set, the external pose source.
    ///
    /// `wrench` is the true body-frame wrench including gravity, as returned by
    /// [`crate::sim::applied_wrench`].
    pub fn sense(
        &mut self,
        time: f64,
        state: &VehicleState,
        wrench: &Wrench,
        params: &VehicleParams,
        with_pose: bool,
    ) -> SensorSample {
        let r_wb = state.attitude.inverse();
        let specific_force = (wrench.force - r_wb * (params.mass * params.gravity_world())) / params.mass;
        let gyro = state.rate + self.spec.gyro_bias + self.noise3(self.spec.gyro_std);
        let accel = specific_force + self.noise3(self.spec.accel_std);
        let pose = with_pose.then(|| {
            let dp = self.noise3(self.spec.pose_pos_std);
            let dq = self.noise3(self.spec.pose_att_std);
            PoseMeasurement {
                position: state.position + dp,
                attitude: state.attitude * UnitQuaternion::from_scaled_axis(dq),
            }
        });
        SensorSample { time, gyro, accel, pose }
    }
}

/// First-order low-pass filter applied elementwise to 3-vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowPass {
    cutoff_hz: f64,
    state: Option<Vector3<f64>>,
}

impl LowPass {
    pub fn new(cutoff_hz: f64) -> Self {
        Self { cutoff_hz, state: None }
    }

    /// Starts from a known output instead of latching the first sample.
    pub fn with_state(cutoff_hz: f64, state: Vector3<f64>) -> Self {
        Self { cutoff_hz, state: Some(state) }
    }

    pub fn output(&self) -> Option<Vector3<f64>> {
        self.state
    }

    /// Feeds one sample taken `dt` after the previous one. The pole is placed
    /// at exp(-2π·fc·dt); DC gain is one.
    pub fn step(&mut self, sample: Vector3<f64>, dt: f64) -> Vector3<f64> {
        let y = match self.state {
            None => sample,
            Some(prev) => {
                let alpha = 1.0 - (-2.0 * std::f64::consts::PI * self.cutoff_hz * dt).exp();
                prev + (sample - prev) * alpha
            }
        };
        self.state = Some(y);
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::applied_wrench;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn hover() -> (VehicleParams, VehicleState, Wrench) {
        let p = VehicleParams::default();
        let s = VehicleState::hover(Vector3::new(0.0, 0.0, 1.0), 0.0, &p);
        let w = applied_wrench(&s, &p, &DisturbanceSpec::none()).unwrap();
        (p, s, w)
    }

    #[test]
    fn noiseless_gyro_is_exact() {
        let (p, mut s, w) = hover();
        s.rate = Vector3::new(0.1, -0.2, 0.3);
        let mut m = SensorModel::new(DisturbanceSpec::none());
        let sample = m.sense(0.0, &s, &w, &p, true);
        assert_eq!(sample.gyro, s.rate);
        assert_eq!(sample.pose.unwrap().position, s.position);
    }

    #[test]
    fn hover_specific_force_lies_on_thrust_axis() {
        let (p, s, w) = hover();
        let mut m = SensorModel::new(DisturbanceSpec::none());
        let a = m.sense(0.0, &s, &w, &p, false).accel;
        assert_relative_eq!(a.norm(), 9.81, epsilon = 1e-9);
        assert_relative_eq!(a, Vector3::new(0.0, 0.0, -9.81), epsilon = 1e-9);
    }

    #[test]
    fn seeded_samples_repeat() {
        let (p, s, w) = hover();
        let spec = DisturbanceSpec { seed: 42, ..Default::default() };
        let run = || {
            let mut m = SensorModel::new(spec);
            (0..20).map(|k| m.sense(k as f64, &s, &w, &p, k % 2 == 0)).collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
        let other = {
            let mut m = SensorModel::new(DisturbanceSpec { seed: 43, ..spec });
            m.sense(0.0, &s, &w, &p, true)
        };
        assert_ne!(run()[0], other);
    }

    #[test]
    fn lowpass_dc_gain_is_one() {
        let mut f = LowPass::with_state(20.0, Vector3::zeros());
        let u = Vector3::new(1.0, -2.0, 3.0);
        let mut y = Vector3::zeros();
        for _ in 0..2000 {
            y = f.step(u, 1e-3);
        }
        assert_relative_eq!(y, u, epsilon = 1e-12);
    }

    fn amplitude_ratio(freq: f64, dt: f64) -> f64 {
        let mut f = LowPass::with_state(20.0, Vector3::zeros());
        let n = (2.0 / dt) as usize;
        let mut peak: f64 = 0.0;
        for k in 0..n {
            let t = k as f64 * dt;
            let y = f.step(Vector3::repeat((2.0 * PI * freq * t).sin()), dt);
            if t > 1.0 {
                peak = peak.max(y.x.abs());
            }
        }
        peak
    }

    #[test]
    fn lowpass_magnitude_response() {
        let continuous = |f: f64| 1.0 / (1.0 + (f / 20.0f64).powi(2)).sqrt();
        assert_relative_eq!(continuous(200.0), 0.0995, epsilon = 1e-4);
        assert_relative_eq!(amplitude_ratio(20.0, 1e-5), 1.0 / 2f64.sqrt(), max_relative = 2e-3);
        assert_relative_eq!(amplitude_ratio(200.0, 1e-5), 0.0995, max_relative = 5e-3);
    }
}
