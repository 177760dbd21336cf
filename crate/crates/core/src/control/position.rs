use nalgebra::Vector3;

use crate::params::{ControllerGains, VehicleParams};

/// Reference for the outer loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Setpoint {
    /// World position, m.
    pub position: Vector3<f64>,
    /// World velocity, m/s.
    pub velocity: Vector3<f64>,
    /// Heading in (-π, π], rad.
    pub heading: f64,
}

impl Setpoint {
    pub fn new(position: Vector3<f64>, velocity: Vector3<f64>, heading: f64) -> Self {
        Self { position, velocity, heading: wrap_angle(heading) }
    }

    pub fn hold(position: Vector3<f64>, heading: f64) -> Self {
        Self::new(position, Vector3::zeros(), heading)
    }
}

/// Wraps an angle into (-π, π].
pub fn wrap_angle(angle: f64) -> f64 {
    use std::f64::consts::PI;
    let wrapped = (angle + PI).rem_euclid(2.0 * PI) - PI;
    if wrapped <= -PI {
        wrapped + 2.0 * PI
    } else {
        wrapped
    }
}

/// Second-order position law. Returns the desired world-frame force, N.
pub fn position_control(
    setpoint: &Setpoint,
    position: &Vector3<f64>,
    velocity: &Vector3<f64>,
    gains: &ControllerGains,
    params: &VehicleParams,
) -> Vector3<f64> {
    let kp = |tau: f64| 1.0 / (tau * tau);
    let kd = |tau: f64, zeta: f64| 2.0 * zeta / tau;
    let stiffness = Vector3::new(kp(gains.tau_p_xy), kp(gains.tau_p_xy), kp(gains.tau_p_z));
    let damping = Vector3::new(
        kd(gains.tau_p_xy, gains.zeta_p_xy),
        kd(gains.tau_p_xy, gains.zeta_p_xy),
        kd(gains.tau_p_z, gains.zeta_p_z),
    );
    let accel = -params.gravity_world()
        + stiffness.component_mul(&(setpoint.position - position))
        + damping.component_mul(&(setpoint.velocity - velocity));
    accel * params.mass
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn run(p_err: Vector3<f64>, v_err: Vector3<f64>) -> Vector3<f64> {
        let sp = Setpoint::new(p_err, v_err, 0.0);
        position_control(&sp, &Vector3::zeros(), &Vector3::zeros(), &ControllerGains::default(), &VehicleParams::default())
    }

    #[test]
    fn zero_error_is_hover_force() {
        let f = run(Vector3::zeros(), Vector3::zeros());
        assert_relative_eq!(f, Vector3::new(0.0, 0.0, 6.3765), epsilon = 1e-12);
    }

    #[test]
    fn unit_x_error() {
        let f = run(Vector3::new(1.0, 0.0, 0.0), Vector3::zeros());
        assert_relative_eq!(f, Vector3::new(2.6, 0.0, 6.3765), epsilon = 1e-12);
    }

    #[test]
    fn z_error_uses_vertical_gains() {
        let f = run(Vector3::new(0.0, 0.0, 0.3), Vector3::zeros());
        assert_relative_eq!(f.z / 0.65, 9.81 + 0.3 / 0.09, epsilon = 1e-12);
        assert_relative_eq!(f.z / 0.65, 13.143, epsilon = 1e-3);
    }

    #[test]
    fn wrap_angle_range() {
        assert_relative_eq!(wrap_angle(PI), PI);
        assert_relative_eq!(wrap_angle(-PI), PI);
        assert_relative_eq!(wrap_angle(3.0 * PI / 2.0), -PI / 2.0, epsilon = 1e-12);
        assert_relative_eq!(wrap_angle(0.25), 0.25);
    }

    proptest! {
        #[test]
        fn superposition(a in prop::array::uniform12(-5.0f64..5.0)) {
            let (pa, va) = (Vector3::new(a[0], a[1], a[2]), Vector3::new(a[3], a[4], a[5]));
            let (pb, vb) = (Vector3::new(a[6], a[7], a[8]), Vector3::new(a[9], a[10], a[11]));
            let hover = run(Vector3::zeros(), Vector3::zeros());
            let lhs = run(pa + pb, va + vb) - hover;
            let rhs = (run(pa, va) - hover) + (run(pb, vb) - hover);
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
        }
    }
}
