use nalgebra::{Matrix3, UnitQuaternion, Vector3};

use crate::error::{Error, Result};
use crate::model::hover_attitude;

/// Commanded force magnitudes below this are treated as degenerate, N.
pub const MIN_THRUST: f64 = 1e-2;

/// Euler extraction switches to axis-angle when |pitch| exceeds this, rad.
const GIMBAL_GUARD: f64 = 85.0 * std::f64::consts::PI / 180.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttitudeTarget {
    /// Desired body-to-world attitude.
    pub attitude: UnitQuaternion<f64>,
    /// Thrust demanded from each propeller, N.
    pub thrust_per_motor: f64,
}

/// Splits a desired force into a heading rotation and a thrust-axis tilt.
///
/// The heading-only attitude is the hover attitude rotated about world up by
/// `heading`. The tilt is the smallest body rotation, about an axis in the body
/// x–y plane, that carries the thrust axis (-z body) onto `force`.
pub fn attitude_setpoint(force: &Vector3<f64>, heading: f64) -> Result<AttitudeTarget> {
    let magnitude = force.norm();
    if !(magnitude > MIN_THRUST) {
        return Err(Error::DegenerateThrust { magnitude, floor: MIN_THRUST });
    }
    let base = hover_attitude(heading);
    let dir_body = base.inverse() * (force / magnitude);
    let thrust_axis = -Vector3::z();
    let tilt = UnitQuaternion::rotation_between(&thrust_axis, &dir_body)
        .unwrap_or_else(|| UnitQuaternion::from_axis_angle(&Vector3::x_axis(), std::f64::consts::PI));
    Ok(AttitudeTarget { attitude: base * tilt, thrust_per_motor: 0.5 * magnitude })
}

/// Intrinsic Z-Y-X angles (roll, pitch, yaw) of `r = Rz(yaw)·Ry(pitch)·Rx(roll)`.
///
/// Near the pitch singularity the rotation vector is returned instead.
pub fn error_angles(r: &Matrix3<f64>) -> Vector3<f64> {
    let pitch = (-r[(2, 0)]).clamp(-1.0, 1.0).asin();
    if pitch.abs() > GIMBAL_GUARD {
        let rot = nalgebra::Rotation3::from_matrix_unchecked(*r);
        return rot.scaled_axis();
    }
    let roll = r[(2, 1)].atan2(r[(2, 2)]);
    let yaw = r[(1, 0)].atan2(r[(0, 0)]);
    Vector3::new(roll, pitch, yaw)
}

/// Proportional attitude law. Both attitudes are body-to-world.
///
/// The error rotation is `R_est · R_des⁻¹` built from world-to-body matrices,
/// i.e. it maps desired-body coordinates to estimated-body coordinates. Its
/// angles are minus the body-frame rotation still to be performed, so scaling
/// them by 1/τ gives body rates that close the error.
pub fn attitude_control(
    estimate: &UnitQuaternion<f64>,
    desired: &UnitQuaternion<f64>,
    tau_att: f64,
) -> Vector3<f64> {
    let r_est = estimate.inverse().to_rotation_matrix();
    let r_des = desired.inverse().to_rotation_matrix();
    let r_err = r_est * r_des.inverse();
    error_angles(r_err.matrix()) / tau_att
}
