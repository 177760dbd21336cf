use nalgebra::Vector3;

use crate::params::ControllerGains;

/// Integral of the body-rate error, rad.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RateIntegral(pub Vector3<f64>);

/// PI rate law with rigid-body cross-coupling compensation.
///
/// The torque uses the integral accumulated so far; the integral is then
/// advanced by `err·dt` unless `freeze` is set (actuator saturation).
pub fn rate_control(
    rate_est: &Vector3<f64>,
    rate_des: &Vector3<f64>,
    integral: &mut RateIntegral,
    dt: f64,
    gains: &ControllerGains,
    inertia: &Vector3<f64>,
    freeze: bool,
) -> Vector3<f64> {
    let err = rate_des - rate_est;
    let gyroscopic = rate_est.cross(&rate_est.component_mul(inertia));
    let proportional = err.component_div(&gains.tau_rate).component_mul(inertia);
    let integral_term = gains.ki_rate.component_mul(inertia).component_mul(&integral.0);
    if !freeze {
        integral.0 += err * dt;
    }
    gyroscopic + proportional + integral_term
}
