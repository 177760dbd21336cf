use nalgebra::{Quaternion, SVector, UnitQuaternion, Vector3};

use crate::error::{Error, Result};
use crate::model::{total_wrench, ActuatorCommand, ActuatorState, Wrench};
use crate::params::VehicleParams;
use crate::sim::DisturbanceSpec;

/// Largest physics step accepted by [`step`], s.
pub const MAX_STEP: f64 = 2e-3;

/// Rigid-body state plus the actual actuator positions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleState {
    /// World position, m (z up).
    pub position: Vector3<f64>,
    /// World velocity, m/s.
    pub velocity: Vector3<f64>,
    /// Rotation taking body-frame vectors to the world frame.
    pub attitude: UnitQuaternion<f64>,
    /// Body angular rate, rad/s.
    pub rate: Vector3<f64>,
    pub actuators: ActuatorState,
}

impl VehicleState {
    /// Trimmed hover at `position` with the given heading.
    pub fn hover(position: Vector3<f64>, heading: f64, params: &VehicleParams) -> Self {
        Self {
            position,
            velocity: Vector3::zeros(),
            attitude: crate::model::hover_attitude(heading),
            rate: Vector3::zeros(),
            actuators: ActuatorState::hover(params),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.position.iter().all(|v| v.is_finite())
            && self.velocity.iter().all(|v| v.is_finite())
            && self.attitude.coords.iter().all(|v| v.is_finite())
            && self.rate.iter().all(|v| v.is_finite())
            && self.actuators.is_finite()
    }

    fn pack(&self) -> SVector<f64, 13> {
        let q = self.attitude.quaternion();
        let mut x = SVector::<f64, 13>::zeros();
        x.fixed_rows_mut::<3>(0).copy_from(&self.position);
        x.fixed_rows_mut::<3>(3).copy_from(&self.velocity);
        x[6] = q.w;
        x[7] = q.i;
        x[8] = q.j;
        x[9] = q.k;
        x.fixed_rows_mut::<3>(10).copy_from(&self.rate);
        x
    }

    fn unpack(x: &SVector<f64, 13>, actuators: ActuatorState) -> Self {
        Self {
            position: x.fixed_rows::<3>(0).into_owned(),
            velocity: x.fixed_rows::<3>(3).into_owned(),
            attitude: UnitQuaternion::new_normalize(Quaternion::new(x[6], x[7], x[8], x[9])),
            rate: x.fixed_rows::<3>(10).into_owned(),
            actuators,
        }
    }
}

/// Time derivative of the rigid-body part of [`VehicleState`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDerivative {
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
    pub attitude: Quaternion<f64>,
    pub rate: Vector3<f64>,
}

impl StateDerivative {
    fn pack(&self) -> SVector<f64, 13> {
        let mut x = SVector::<f64, 13>::zeros();
        x.fixed_rows_mut::<3>(0).copy_from(&self.position);
        x.fixed_rows_mut::<3>(3).copy_from(&self.velocity);
        x[6] = self.attitude.w;
        x[7] = self.attitude.i;
        x[8] = self.attitude.j;
        x[9] = self.attitude.k;
        x.fixed_rows_mut::<3>(10).copy_from(&self.rate);
        x
    }
}

/// Newton–Euler equations. `wrench` is in the body frame and already contains gravity.
pub fn derivative(state: &VehicleState, wrench: &Wrench, params: &VehicleParams) -> StateDerivative {
    let j = params.inertia;
    let w = state.rate;
    let jw = w.component_mul(&j);
    let omega_quat = Quaternion::from_imag(w);
    StateDerivative {
        position: state.velocity,
        velocity: state.attitude * wrench.force / params.mass,
        attitude: state.attitude.quaternion() * omega_quat * 0.5,
        rate: (wrench.torque - w.cross(&jw)).component_div(&j),
    }
}

/// Advances propellers and elevons toward their commands with first-order lags.
///
/// Commands are clamped to the actuator limits first; the update is the exact
/// solution for a command held over `dt`.
pub fn actuator_step(
    act: &ActuatorState,
    cmd: &ActuatorCommand,
    dt: f64,
    params: &VehicleParams,
) -> ActuatorState {
    let target = cmd.as_state().saturated(params);
    let a_motor = 1.0 - (-dt / params.tau_motor).exp();
    let a_servo = 1.0 - (-dt / params.tau_servo).exp();
    ActuatorState {
        omega_left: act.omega_left + (target.omega_left - act.omega_left) * a_motor,
        omega_right: act.omega_right + (target.omega_right - act.omega_right) * a_motor,
        delta_left: act.delta_left + (target.delta_left - act.delta_left) * a_servo,
        delta_right: act.delta_right + (target.delta_right - act.delta_right) * a_servo,
    }
    .saturated(params)
}

/// Body-frame wrench on the airframe, including gravity and constant disturbance offsets.
pub fn applied_wrench(
    state: &VehicleState,
    params: &VehicleParams,
    disturbance: &DisturbanceSpec,
) -> Result<Wrench> {
    let r_wb = state.attitude.inverse().to_rotation_matrix();
    let mut w = total_wrench(&state.actuators, &r_wb, params)?;
    w.force += r_wb * disturbance.force_offset;
    w.torque += disturbance.torque_offset;
    Ok(w)
}

/// One classical fourth-order Runge–Kutta step of length `dt`.
///
/// Within the step the actuators follow their exact lag response, so the stage
/// evaluations see the actuator positions at the stage times.
pub fn step(
    state: &VehicleState,
    cmd: &ActuatorCommand,
    dt: f64,
    params: &VehicleParams,
    disturbance: &DisturbanceSpec,
) -> Result<VehicleState> {
    if !(dt > 0.0 && dt <= MAX_STEP) {
        return Err(Error::Domain(format!("step size {dt} s outside (0, {MAX_STEP}]")));
    }
    let diverged = |_| Error::SimulationDiverged { time: f64::NAN };
    let x0 = state.pack();
    let eval = |x: &SVector<f64, 13>, h: f64| -> Result<SVector<f64, 13>> {
        let act = actuator_step(&state.actuators, cmd, h, params);
        let s = VehicleState::unpack(x, act);
        let w = applied_wrench(&s, params, disturbance).map_err(diverged)?;
        let mut d = derivative(&s, &w, params);
        // The stage quaternion is renormalised by unpack; differentiate the raw one.
        d.attitude = Quaternion::new(x[6], x[7], x[8], x[9]) * Quaternion::from_imag(s.rate) * 0.5;
        Ok(d.pack())
    };
    let k1 = eval(&x0, 0.0)?;
    let k2 = eval(&(x0 + k1 * (dt / 2.0)), dt / 2.0)?;
    let k3 = eval(&(x0 + k2 * (dt / 2.0)), dt / 2.0)?;
    let k4 = eval(&(x0 + k3 * dt), dt)?;
    let x1 = x0 + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    let next = VehicleState::unpack(&x1, actuator_step(&state.actuators, cmd, dt, params));
    if !next.is_finite() || !x1.iter().all(|v| v.is_finite()) {
        return Err(Error::SimulationDiverged { time: f64::NAN });
    }
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params() -> VehicleParams {
        VehicleParams::default()
    }

    #[test]
    fn hover_is_an_equilibrium() {
        let p = params();
        let s = VehicleState::hover(Vector3::new(0.0, 0.0, 1.5), 0.3, &p);
        let w = applied_wrench(&s, &p, &DisturbanceSpec::none()).unwrap();
        let d = derivative(&s, &w, &p);
        assert!(d.velocity.norm() < 1e-9);
        assert!(d.rate.norm() < 1e-9);
        assert!(d.position.norm() < 1e-12);
        assert!(d.attitude.norm() < 1e-12);

        let cmd = ActuatorCommand::from_state(&s.actuators);
        for dt in [1e-4, 5e-4, 2e-3] {
            let n = step(&s, &cmd, dt, &p, &DisturbanceSpec::none()).unwrap();
            assert!((n.position - s.position).norm() < 1e-9);
            assert!(n.velocity.norm() < 1e-9);
            assert!(n.rate.norm() < 1e-9);
            assert!(n.attitude.angle_to(&s.attitude) < 1e-9);
        }
    }

    #[test]
    fn principal_axis_spin_has_no_gyroscopic_acceleration() {
        let p = params();
        let mut s = VehicleState::hover(Vector3::zeros(), 0.0, &p);
        s.rate = Vector3::new(1.0, 0.0, 0.0);
        let d = derivative(&s, &Wrench::zero(), &p);
        assert_eq!(d.rate, Vector3::zeros());
    }

    #[test]
    fn pure_roll_torque() {
        let p = params();
        let s = VehicleState::hover(Vector3::zeros(), 0.0, &p);
        let w = Wrench::new(Vector3::zeros(), Vector3::new(0.035, 0.0, 0.0));
        let d = derivative(&s, &w, &p);
        assert_relative_eq!(d.rate, Vector3::new(2.5, 0.0, 0.0), epsilon = 1e-12);
    }

    #[test]
    fn free_fall() {
        let p = params();
        let mut s = VehicleState::hover(Vector3::zeros(), 0.0, &p);
        s.actuators = ActuatorState::default();
        let cmd = ActuatorCommand::default();
        for _ in 0..1000 {
            s = step(&s, &cmd, 1e-3, &p, &DisturbanceSpec::none()).unwrap();
        }
        assert_relative_eq!(s.velocity.z, -9.81, epsilon = 1e-6);
        assert_relative_eq!(s.position.z, -0.5 * 9.81, epsilon = 1e-6);
    }

    #[test]
    fn rejects_bad_step() {
        let p = params();
        let s = VehicleState::hover(Vector3::zeros(), 0.0, &p);
        let cmd = ActuatorCommand::default();
        assert!(step(&s, &cmd, 0.0, &p, &DisturbanceSpec::none()).is_err());
        assert!(step(&s, &cmd, 3e-3, &p, &DisturbanceSpec::none()).is_err());
    }

    #[test]
    fn actuator_fixed_point() {
        let p = params();
        let act = ActuatorState { omega_left: 500.0, omega_right: 600.0, delta_left: 0.1, delta_right: -0.2 };
        let next = actuator_step(&act, &ActuatorCommand::from_state(&act), 0.01, &p);
        assert_eq!(next, act);
    }

    #[test]
    fn motor_step_response_after_one_time_constant() {
        let p = params();
        let cmd = ActuatorCommand { omega_left: 636.9, omega_right: 636.9, ..Default::default() };
        let mut act = ActuatorState::default();
        for _ in 0..50 {
            act = actuator_step(&act, &cmd, 5e-4, &p);
        }
        let expected = 636.9 * (1.0 - (-1.0f64).exp());
        assert_relative_eq!(act.omega_left, expected, epsilon = 1e-9);
        assert_relative_eq!(act.omega_left, 402.6, epsilon = 0.05);
    }

    #[test]
    fn actuator_saturates() {
        let p = params();
        let cmd = ActuatorCommand { omega_left: 2000.0, omega_right: -5.0, delta_left: 3.0, delta_right: -3.0 };
        let act = actuator_step(&ActuatorState::hover(&p), &cmd, 10.0, &p);
        assert_relative_eq!(act.omega_left, p.omega_max, epsilon = 1e-9);
        assert!(act.omega_left <= p.omega_max);
        assert!(act.omega_right >= 0.0);
        assert!(act.delta_left <= p.delta_max && act.delta_right >= -p.delta_max);
    }

    #[test]
    fn torque_free_angular_momentum_magnitude_is_conserved() {
        let p = params();
        let mut s = VehicleState::hover(Vector3::zeros(), 0.0, &p);
        s.actuators = ActuatorState::default();
        s.rate = Vector3::new(3.0, -1.0, 2.0);
        let h0 = s.rate.component_mul(&p.inertia).norm();
        for _ in 0..4000 {
            s = step(&s, &ActuatorCommand::default(), 5e-4, &p, &DisturbanceSpec::none()).unwrap();
            assert!((s.attitude.norm() - 1.0).abs() < 1e-9);
        }
        let h1 = s.rate.component_mul(&p.inertia).norm();
        assert_relative_eq!(h0, h1, max_relative = 1e-9);
    }
}
