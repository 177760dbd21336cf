//! Propeller and elevon force/torque model in the hover regime.
//!
//! Body frame: z runs from nose to tail, so propeller thrust acts along -z;
//! y runs along the wing toward the right motor; x completes the right-handed
//! triad. The left rotor sits at (0, -l, 0) and the right rotor at (0, +l, 0).
//! The left propeller's reaction torque is +k_m·ω² about z, the right one's
//! is -k_m·ω².

use std::ops::{Add, AddAssign};

use nalgebra::{Rotation3, UnitQuaternion, Vector3};

use crate::error::{Error, Result};
use crate::params::VehicleParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    /// Sign of the propeller reaction torque about body z.
    pub fn torque_sign(self) -> f64 {
        match self {
            Side::Left => 1.0,
            Side::Right => -1.0,
        }
    }

    /// Body-frame position of this side's rotor and elevon.
    pub fn arm(self, params: &VehicleParams) -> Vector3<f64> {
        match self {
            Side::Left => Vector3::new(0.0, -params.arm, 0.0),
            Side::Right => Vector3::new(0.0, params.arm, 0.0),
        }
    }
}

/// Actual propeller speeds (rad/s) and elevon deflections (rad).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ActuatorState {
    pub omega_left: f64,
    pub omega_right: f64,
    pub delta_left: f64,
    pub delta_right: f64,
}

impl ActuatorState {
    pub fn hover(params: &VehicleParams) -> Self {
        let w = params.hover_omega();
        Self { omega_left: w, omega_right: w, delta_left: 0.0, delta_right: 0.0 }
    }

    pub fn omega(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.omega_left,
            Side::Right => self.omega_right,
        }
    }

    pub fn delta(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.delta_left,
            Side::Right => self.delta_right,
        }
    }

    /// Clamp every channel to the actuator limits.
    pub fn saturated(&self, params: &VehicleParams) -> Self {
        let w = |x: f64| x.clamp(0.0, params.omega_max);
        let d = |x: f64| x.clamp(-params.delta_max, params.delta_max);
        Self {
            omega_left: w(self.omega_left),
            omega_right: w(self.omega_right),
            delta_left: d(self.delta_left),
            delta_right: d(self.delta_right),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.omega_left.is_finite()
            && self.omega_right.is_finite()
            && self.delta_left.is_finite()
            && self.delta_right.is_finite()
    }
}

/// Commanded propeller speeds (rad/s) and elevon deflections (rad).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ActuatorCommand {
    pub omega_left: f64,
    pub omega_right: f64,
    pub delta_left: f64,
    pub delta_right: f64,
}

impl ActuatorCommand {
    pub fn from_state(act: &ActuatorState) -> Self {
        Self {
            omega_left: act.omega_left,
            omega_right: act.omega_right,
            delta_left: act.delta_left,
            delta_right: act.delta_right,
        }
    }

    pub fn as_state(&self) -> ActuatorState {
        ActuatorState {
            omega_left: self.omega_left,
            omega_right: self.omega_right,
            delta_left: self.delta_left,
            delta_right: self.delta_right,
        }
    }
}

/// Body-frame force (N) and torque (N·m) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wrench {
    pub force: Vector3<f64>,
    pub torque: Vector3<f64>,
}

impl Wrench {
    pub fn new(force: Vector3<f64>, torque: Vector3<f64>) -> Self {
        Self { force, torque }
    }

    pub fn zero() -> Self {
        Self { force: Vector3::zeros(), torque: Vector3::zeros() }
    }

    pub fn is_finite(&self) -> bool {
        self.force.iter().chain(self.torque.iter()).all(|v| v.is_finite())
    }

    /// Moves the point of application from the origin to `arm`, adding the induced moment.
    pub fn applied_at(&self, arm: &Vector3<f64>) -> Self {
        Self { force: self.force, torque: self.torque + arm.cross(&self.force) }
    }
}

impl Add for Wrench {
    type Output = Wrench;

    fn add(self, rhs: Wrench) -> Wrench {
        Wrench { force: self.force + rhs.force, torque: self.torque + rhs.torque }
    }
}

impl AddAssign for Wrench {
    fn add_assign(&mut self, rhs: Wrench) {
        self.force += rhs.force;
        self.torque += rhs.torque;
    }
}

impl std::iter::Sum for Wrench {
    fn sum<I: Iterator<Item = Wrench>>(iter: I) -> Wrench {
        iter.fold(Wrench::zero(), Add::add)
    }
}

fn check_omega(omega: f64, params: &VehicleParams) -> Result<()> {
    if !(0.0..=params.omega_max).contains(&omega) {
        return Err(Error::Domain(format!(
            "propeller speed {omega} rad/s outside [0, {}]",
            params.omega_max
        )));
    }
    Ok(())
}

fn check_delta(delta: f64, params: &VehicleParams) -> Result<()> {
    if !(delta.abs() <= params.delta_max) {
        return Err(Error::Domain(format!(
            "elevon deflection {delta} rad outside ±{}",
            params.delta_max
        )));
    }
    Ok(())
}

/// Thrust and reaction torque of one propeller, about its own hub.
pub fn prop_wrench(omega: f64, side: Side, params: &VehicleParams) -> Result<Wrench> {
    check_omega(omega, params)?;
    let w2 = omega * omega;
    Ok(Wrench::new(
        Vector3::new(0.0, 0.0, -params.k_thrust * w2),
        Vector3::new(0.0, 0.0, side.torque_sign() * params.k_moment * w2),
    ))
}

/// Lift, drag and pitch moment of one elevon immersed in its propeller's downwash.
pub fn aero_wrench(omega: f64, delta: f64, params: &VehicleParams) -> Result<Wrench> {
    check_omega(omega, params)?;
    check_delta(delta, params)?;
    let w2 = omega * omega;
    Ok(Wrench::new(
        Vector3::new(-params.k_lift * w2 * delta, 0.0, params.k_drag * w2 * delta * delta),
        Vector3::new(0.0, -params.k_pitch * w2 * delta, 0.0),
    ))
}

/// Wrench of one side's rotor and elevon, referred to the centre of mass.
pub fn side_wrench(act: &ActuatorState, side: Side, params: &VehicleParams) -> Result<Wrench> {
    let omega = act.omega(side);
    let local = prop_wrench(omega, side, params)? + aero_wrench(omega, act.delta(side), params)?;
    Ok(local.applied_at(&side.arm(params)))
}

/// Total body-frame wrench including gravity.
///
/// `r_wb` rotates world-frame vectors into the body frame.
pub fn total_wrench(act: &ActuatorState, r_wb: &Rotation3<f64>, params: &VehicleParams) -> Result<Wrench> {
    let mut w = side_wrench(act, Side::Left, params)? + side_wrench(act, Side::Right, params)?;
    w.force += r_wb * (params.mass * params.gravity_world());
    Ok(w)
}

/// Body-to-world attitude of a vehicle hovering nose-up with the given heading.
///
/// At zero heading body x is aligned with world x and the thrust axis (-z body)
/// points straight up.
pub fn hover_attitude(heading: f64) -> UnitQuaternion<f64> {
    UnitQuaternion::from_axis_angle(&Vector3::z_axis(), heading)
        * UnitQuaternion::from_axis_angle(&Vector3::x_axis(), std::f64::consts::PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params() -> VehicleParams {
        VehicleParams::default()
    }

    #[test]
    fn prop_wrench_zero_speed() {
        let w = prop_wrench(0.0, Side::Left, &params()).unwrap();
        assert_eq!(w, Wrench::zero());
    }

    #[test]
    fn prop_wrench_half_weight() {
        let w = prop_wrench(636.9, Side::Left, &params()).unwrap();
        assert_relative_eq!(w.force.z, -3.188, epsilon = 1e-3);
        assert_relative_eq!(w.torque.z, 0.0730, epsilon = 1e-4);
        assert_eq!(w.force.x, 0.0);
    }

    #[test]
    fn prop_wrench_max_thrust() {
        let w = prop_wrench(790.0, Side::Right, &params()).unwrap();
        assert_relative_eq!(w.force.z, -4.905, epsilon = 2e-3);
        assert!(w.torque.z < 0.0);
    }

    #[test]
    fn prop_wrench_rejects_out_of_range() {
        assert!(matches!(prop_wrench(-1.0, Side::Left, &params()), Err(Error::Domain(_))));
        assert!(matches!(prop_wrench(800.0, Side::Left, &params()), Err(Error::Domain(_))));
        assert!(prop_wrench(f64::NAN, Side::Left, &params()).is_err());
    }

    #[test]
    fn aero_wrench_examples() {
        let p = params();
        assert_eq!(aero_wrench(636.9, 0.0, &p).unwrap(), Wrench::zero());

        let w = aero_wrench(636.9, 0.1, &p).unwrap();
        assert_relative_eq!(w.force.x, -0.1412, epsilon = 1e-4);
        assert_relative_eq!(w.force.z, 0.00710, epsilon = 1e-5);
        assert_relative_eq!(w.torque.y, -0.01395, epsilon = 1e-5);

        let n = aero_wrench(636.9, -0.1, &p).unwrap();
        assert_eq!(n.force.x, -w.force.x);
        assert_eq!(n.force.z, w.force.z);
        assert_eq!(n.torque.y, -w.torque.y);

        assert!(aero_wrench(636.9, 0.8, &p).is_err());
    }

    #[test]
    fn hover_balances() {
        let p = params();
        let r_wb = hover_attitude(0.0).inverse().to_rotation_matrix();
        let w = total_wrench(&ActuatorState::hover(&p), &r_wb, &p).unwrap();
        assert!(w.force.norm() < 1e-9, "{:?}", w.force);
        assert!(w.torque.norm() < 1e-9, "{:?}", w.torque);
    }

    #[test]
    fn differential_thrust_rolls() {
        let p = params();
        let act = ActuatorState { omega_left: 661.4, omega_right: 611.4, ..Default::default() };
        let w = total_wrench(&act, &Rotation3::identity(), &p).unwrap();
        assert_relative_eq!(w.torque.x, 0.1, epsilon = 1e-3);
        let expected = p.k_thrust * p.arm * (661.4f64.powi(2) - 611.4f64.powi(2));
        assert_relative_eq!(w.torque.x, expected, max_relative = 1e-12);
    }

    #[test]
    fn no_actuation_is_gravity_only() {
        let p = params();
        let w = total_wrench(&ActuatorState::default(), &Rotation3::identity(), &p).unwrap();
        assert_eq!(w.force, Vector3::new(0.0, 0.0, -p.mass * p.g_mag));
        assert_eq!(w.torque, Vector3::zeros());
    }

    #[test]
    fn hover_attitude_points_thrust_up() {
        let q = hover_attitude(0.7);
        let thrust_axis = q * -Vector3::z();
        assert_relative_eq!(thrust_axis, Vector3::z(), epsilon = 1e-12);
        let nose = q * Vector3::x();
        assert_relative_eq!(nose.y.atan2(nose.x), 0.7, epsilon = 1e-12);
    }
}
