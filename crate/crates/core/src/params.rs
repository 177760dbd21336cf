//! Physical constants of the airframe and gains of the cascaded controller.
//!
//! Defaults are the identified values of the reference vehicle (0.65 kg,
//! 8-inch propellers over a symmetric-airfoil wing).

use nalgebra::{Matrix3, Vector3};

use crate::error::{ConfigIssue, Error, Result};

/// Physical and aerodynamic constants of the vehicle plus actuator limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleParams {
    /// Mass, kg.
    pub mass: f64,
    /// Motor arm length to the centre of mass, m.
    pub arm: f64,
    /// Wing span, m.
    pub span: f64,
    /// Diagonal of the inertia tensor (Jxx, Jyy, Jzz), kg·m².
    pub inertia: Vector3<f64>,
    /// Propeller thrust constant, N·s²/rad².
    pub k_thrust: f64,
    /// Propeller reaction-torque constant, N·m·s²/rad².
    pub k_moment: f64,
    /// Elevon lift constant, N·s²/rad².
    pub k_lift: f64,
    /// Elevon drag constant, N·s²/rad².
    pub k_drag: f64,
    /// Elevon pitch-moment constant, N·m·s²/rad².
    pub k_pitch: f64,
    /// Maximum propeller speed, rad/s.
    pub omega_max: f64,
    /// Maximum elevon deflection magnitude, rad.
    pub delta_max: f64,
    /// Gravitational acceleration, m/s².
    pub g_mag: f64,
    /// Closed-loop propeller speed time constant, s.
    pub tau_motor: f64,
    /// Elevon servo time constant, s.
    pub tau_servo: f64,
}

impl Default for VehicleParams {
    fn default() -> Self {
        Self {
            mass: 0.65,
            arm: 0.20,
            span: 0.64,
            inertia: Vector3::new(1.4e-2, 6.4e-3, 1.8e-2),
            k_thrust: 7.86e-6,
            k_moment: 1.80e-7,
            k_lift: 3.48e-6,
            k_drag: 1.75e-6,
            k_pitch: 3.44e-7,
            omega_max: 790.0,
            delta_max: 0.785,
            g_mag: 9.81,
            tau_motor: 0.025,
            tau_servo: 0.020,
        }
    }
}

impl VehicleParams {
    pub fn inertia_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_diagonal(&self.inertia)
    }

    /// World-frame gravity vector; world z points up.
    pub fn gravity_world(&self) -> Vector3<f64> {
        Vector3::new(0.0, 0.0, -self.g_mag)
    }

    /// Per-propeller speed that balances gravity with level wings and no deflection.
    pub fn hover_omega(&self) -> f64 {
        (self.mass * self.g_mag / (2.0 * self.k_thrust)).sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        let mut issues = Vec::new();
        let positive = [
            ("m", self.mass),
            ("l", self.arm),
            ("b", self.span),
            ("J_xx", self.inertia.x),
            ("J_yy", self.inertia.y),
            ("J_zz", self.inertia.z),
            ("k_t", self.k_thrust),
            ("k_m", self.k_moment),
            ("k_l", self.k_lift),
            ("k_d", self.k_drag),
            ("k_p", self.k_pitch),
            ("omega_max", self.omega_max),
            ("delta_max", self.delta_max),
            ("g_mag", self.g_mag),
            ("tau_motor", self.tau_motor),
            ("tau_servo", self.tau_servo),
        ];
        for (key, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                issues.push(ConfigIssue::Invalid {
                    key: key.to_string(),
                    reason: format!("must be strictly positive, got {value}"),
                });
            }
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(issues))
        }
    }
}

/// Time constants and gains of the position, attitude and rate loops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerGains {
    pub tau_p_xy: f64,
    pub tau_p_z: f64,
    pub zeta_p_xy: f64,
    pub zeta_p_z: f64,
    pub tau_att: f64,
    /// Rate-loop time constants per body axis, s.
    pub tau_rate: Vector3<f64>,
    /// Rate-loop integral gains per body axis, 1/s.
    pub ki_rate: Vector3<f64>,
}

impl Default for ControllerGains {
    fn default() -> Self {
        Self {
            tau_p_xy: 0.5,
            tau_p_z: 0.3,
            zeta_p_xy: 0.6,
            zeta_p_z: 0.83,
            tau_att: 0.2,
            tau_rate: Vector3::new(0.04, 0.11, 0.04),
            ki_rate: Vector3::new(20.0, 5.0, 0.0),
        }
    }
}

impl ControllerGains {
    pub fn validate(&self) -> Result<()> {
        let mut issues = Vec::new();
        let taus = [
            ("tau_p_xy", self.tau_p_xy),
            ("tau_p_z", self.tau_p_z),
            ("tau_att", self.tau_att),
            ("tau_w_x", self.tau_rate.x),
            ("tau_w_y", self.tau_rate.y),
            ("tau_w_z", self.tau_rate.z),
        ];
        for (key, value) in taus {
            if !(value.is_finite() && value > 0.0) {
                issues.push(ConfigIssue::Invalid {
                    key: key.to_string(),
                    reason: format!("time constant must be strictly positive, got {value}"),
                });
            }
        }
        for (key, value) in [("zeta_p_xy", self.zeta_p_xy), ("zeta_p_z", self.zeta_p_z)] {
            if !(value > 0.0 && value <= 2.0) {
                issues.push(ConfigIssue::Invalid {
                    key: key.to_string(),
                    reason: format!("damping ratio must lie in (0, 2], got {value}"),
                });
            }
        }
        for (key, value) in [
            ("K_I_w_x", self.ki_rate.x),
            ("K_I_w_y", self.ki_rate.y),
            ("K_I_w_z", self.ki_rate.z),
        ] {
            if !(value.is_finite() && value >= 0.0) {
                issues.push(ConfigIssue::Invalid {
                    key: key.to_string(),
                    reason: format!("integral gain must be non-negative, got {value}"),
                });
            }
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(issues))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        VehicleParams::default().validate().unwrap();
        ControllerGains::default().validate().unwrap();
    }

    #[test]
    fn hover_omega_balances_weight() {
        let p = VehicleParams::default();
        let w = p.hover_omega();
        assert!((2.0 * p.k_thrust * w * w - p.mass * p.g_mag).abs() < 1e-12);
        assert!((w - 636.9).abs() < 0.05);
    }

    #[test]
    fn rejects_non_positive_constants() {
        let p = VehicleParams { k_thrust: 0.0, arm: -1.0, ..Default::default() };
        match p.validate() {
            Err(Error::Config(issues)) => assert_eq!(issues.len(), 2),
            other => panic!("unexpected {other:?}"),
        }
        let g = ControllerGains { zeta_p_z: 2.5, ..Default::default() };
        assert!(g.validate().is_err());
    }
}
