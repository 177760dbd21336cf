//! Model-inverse actuator allocation.
//!
//! Inverts the drag-free propeller/elevon model: propeller speeds supply the
//! collective thrust and the roll torque, elevons the pitch torque and, together
//! with the propeller reaction torques, the yaw torque.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::model::ActuatorCommand;
use crate::params::VehicleParams;

/// Fraction of the roll-feasibility bound 2·f_a·l that a clamped roll torque may use.
pub const ROLL_MARGIN: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SaturationFlags {
    pub omega: bool,
    pub delta: bool,
}

impl SaturationFlags {
    pub fn any(&self) -> bool {
        self.omega || self.delta
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Allocation {
    /// Command after clamping to actuator limits.
    pub command: ActuatorCommand,
    /// Exact inverse before clamping.
    pub unsaturated: ActuatorCommand,
    pub saturation: SaturationFlags,
}

/// Solves for propeller speeds and elevon deflections that produce `torque`
/// and a per-motor thrust `thrust_per_motor` (drag neglected).
pub fn model_inverse(torque: &Vector3<f64>, thrust_per_motor: f64, params: &VehicleParams) -> Result<Allocation> {
    let (mx, my, mz) = (torque.x, torque.y, torque.z);
    let fa = thrust_per_motor;
    let VehicleParams { arm: l, k_thrust: kt, k_moment: km, k_lift: kl, k_pitch: kp, .. } = *params;
    if !(fa > 0.0) {
        return Err(Error::Domain(format!("per-motor thrust must be positive, got {fa}")));
    }
    let limit = 2.0 * fa * l;
    if !(mx.abs() < limit) {
        return Err(Error::InfeasibleRoll { m_x: mx, limit });
    }
    let omega_left = ((mx + limit) / (2.0 * kt * l)).sqrt();
    let omega_right = ((-mx + limit) / (2.0 * kt * l)).sqrt();
    let common = -kp * kt * mz * l + km * kp * mx;
    let delta_left = (-kl * kt * my * l * l + common) / (kl * kp * l * (mx + limit));
    let delta_right = (kl * kt * my * l * l + common) / (kl * kp * l * (mx - limit));
    let unsaturated = ActuatorCommand { omega_left, omega_right, delta_left, delta_right };
    let (command, saturation) = saturate(&unsaturated, params);
    Ok(Allocation { command, unsaturated, saturation })
}

/// Clamps a command to the actuator limits and reports which channels were clipped.
pub fn saturate(cmd: &ActuatorCommand, params: &VehicleParams) -> (ActuatorCommand, SaturationFlags) {
    let clamped = ActuatorCommand::from_state(&cmd.as_state().saturated(params));
    let flags = SaturationFlags {
        omega: clamped.omega_left != cmd.omega_left || clamped.omega_right != cmd.omega_right,
        delta: clamped.delta_left != cmd.delta_left || clamped.delta_right != cmd.delta_right,
    };
    (clamped, flags)
}

/// Limits the roll torque to the feasible band, keeping [`ROLL_MARGIN`] of it.
/// Returns the clamped value and whether clamping happened.
pub fn clamp_roll(m_x: f64, thrust_per_motor: f64, params: &VehicleParams) -> (f64, bool) {
    let bound = ROLL_MARGIN * 2.0 * thrust_per_motor * params.arm;
    if m_x.abs() > bound {
        (m_x.clamp(-bound, bound), true)
    } else {
        (m_x, false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{side_wrench, Side};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn params() -> VehicleParams {
        VehicleParams::default()
    }

    /// Drag-free forward model: (torque about the centre of mass, total thrust).
    fn forward(cmd: &ActuatorCommand) -> (Vector3<f64>, f64) {
        let p = VehicleParams { k_drag: 0.0, omega_max: f64::INFINITY, delta_max: f64::INFINITY, ..params() };
        let act = cmd.as_state();
        let w = side_wrench(&act, Side::Left, &p).unwrap() + side_wrench(&act, Side::Right, &p).unwrap();
        (w.torque, -w.force.z)
    }

    #[test]
    fn hover_allocation() {
        let p = params();
        let fa = 0.5 * p.mass * p.g_mag;
        let a = model_inverse(&Vector3::zeros(), fa, &p).unwrap();
        assert_relative_eq!(a.command.omega_left, 636.9, epsilon = 0.05);
        assert_eq!(a.command.omega_left, a.command.omega_right);
        assert_eq!(a.command.delta_left, 0.0);
        assert_eq!(a.command.delta_right, 0.0);
        assert!(!a.saturation.any());
    }

    #[test]
    fn roll_torque_allocation() {
        let p = params();
        let a = model_inverse(&Vector3::new(0.1, 0.0, 0.0), 3.188, &p).unwrap();
        assert_relative_eq!(a.command.omega_left, 661.4, epsilon = 0.05);
        assert_relative_eq!(a.command.omega_right, 611.4, epsilon = 0.05);
    }

    #[test]
    fn infeasible_roll_is_reported() {
        let p = params();
        let err = model_inverse(&Vector3::new(1.3, 0.0, 0.0), 3.188, &p).unwrap_err();
        assert!(matches!(err, Error::InfeasibleRoll { .. }));
        assert!(model_inverse(&Vector3::zeros(), 0.0, &p).is_err());
    }

    #[test]
    fn clamp_roll_keeps_margin() {
        let p = params();
        let (m, clamped) = clamp_roll(2.0, 3.0, &p);
        assert!(clamped);
        assert_relative_eq!(m, 0.95 * 2.0 * 3.0 * 0.2, epsilon = 1e-15);
        assert!(model_inverse(&Vector3::new(m, 0.0, 0.0), 3.0, &p).is_ok());
        assert_eq!(clamp_roll(-0.1, 3.0, &p), (-0.1, false));
    }

    #[test]
    fn large_commands_saturate() {
        let p = params();
        let a = model_inverse(&Vector3::new(0.0, 0.5, 0.0), 5.0, &p).unwrap();
        assert!(a.saturation.delta);
        assert!(a.saturation.omega);
        assert!(a.command.omega_left <= p.omega_max);
        assert!(a.command.delta_left.abs() <= p.delta_max);
    }

    proptest! {
        #[test]
        fn round_trip_through_forward_model(
            mx in -0.4f64..0.4, my in -0.2f64..0.2, mz in -0.1f64..0.1, fa in 1.5f64..4.5,
        ) {
            let p = params();
            let torque = Vector3::new(mx, my, mz);
            prop_assume!(mx.abs() < 0.9 * 2.0 * fa * p.arm);
            let a = model_inverse(&torque, fa, &p).unwrap();
            let (m, thrust) = forward(&a.unsaturated);
            let scale = torque.norm().max(1e-3);
            prop_assert!((m - torque).norm() <= 1e-9 * scale, "{m:?} vs {torque:?}");
            prop_assert!((thrust - 2.0 * fa).abs() <= 1e-9 * 2.0 * fa);
        }
    }
}
