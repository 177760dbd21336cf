use std::io::Write;

use nalgebra::{UnitQuaternion, Vector3};

use crate::control::{CascadeFlags, Setpoint};
use crate::error::Result;
use crate::model::{ActuatorCommand, ActuatorState};
use crate::sim::{Estimate, VehicleState};

/// CSV column order. Quaternions are body-to-world, scalar first.
pub const LOG_COLUMNS: [&str; 61] = [
    "t",
    "ref_x", "ref_y", "ref_z", "ref_vx", "ref_vy", "ref_vz", "ref_psi",
    "x", "y", "z", "vx", "vy", "vz", "qw", "qx", "qy", "qz", "p", "q", "r",
    "est_x", "est_y", "est_z", "est_vx", "est_vy", "est_vz",
    "est_qw", "est_qx", "est_qy", "est_qz", "est_p", "est_q", "est_r",
    "f_des_x", "f_des_y", "f_des_z",
    "w_des_x", "w_des_y", "w_des_z",
    "m_des_x", "m_des_y", "m_des_z",
    "cmd_omega_l", "cmd_omega_r", "cmd_delta_l", "cmd_delta_r",
    "omega_l", "omega_r", "delta_l", "delta_r",
    "sat_omega", "sat_delta", "roll_clamped", "thrust_degenerate",
    "err_x", "err_y", "err_z", "speed", "pitch", "thrust_per_motor",
];

#[derive(Debug, Clone, PartialEq)]
pub struct LogRow {
    pub time: f64,
    pub reference: Setpoint,
    pub truth: VehicleState,
    pub estimate: Estimate,
    pub force_des: Vector3<f64>,
    pub rate_des: Vector3<f64>,
    pub torque_des: Vector3<f64>,
    pub thrust_per_motor: f64,
    pub command: ActuatorCommand,
    pub flags: CascadeFlags,
}

impl LogRow {
    pub fn error(&self) -> Vector3<f64> {
        self.truth.position - self.reference.position
    }

    /// Nose-up/down tilt about the wing axis, from the elevation of body x.
    pub fn pitch(&self) -> f64 {
        let x_b = self.truth.attitude * Vector3::x();
        x_b.z.clamp(-1.0, 1.0).asin()
    }

    fn fields(&self) -> Vec<f64> {
        let quat = |q: &UnitQuaternion<f64>| [q.w, q.i, q.j, q.k];
        let s = &self.truth;
        let e = &self.estimate;
        let act: &ActuatorState = &s.actuators;
        let c = &self.command;
        let flag = |b: bool| if b { 1.0 } else { 0.0 };
        let err = self.error();
        let mut out = Vec::with_capacity(LOG_COLUMNS.len());
        out.push(self.time);
        out.extend(self.reference.position.iter());
        out.extend(self.reference.velocity.iter());
        out.push(self.reference.heading);
        out.extend(s.position.iter());
        out.extend(s.velocity.iter());
        out.extend(quat(&s.attitude));
        out.extend(s.rate.iter());
        out.extend(e.position.iter());
        out.extend(e.velocity.iter());
        out.extend(quat(&e.attitude));
        out.extend(e.rate.iter());
        out.extend(self.force_des.iter());
        out.extend(self.rate_des.iter());
        out.extend(self.torque_des.iter());
        out.extend([c.omega_left, c.omega_right, c.delta_left, c.delta_right]);
        out.extend([act.omega_left, act.omega_right, act.delta_left, act.delta_right]);
        out.extend([
            flag(self.flags.saturation.omega),
            flag(self.flags.saturation.delta),
            flag(self.flags.roll_clamped),
            flag(self.flags.thrust_degenerate),
        ]);
        out.extend(err.iter());
        out.push(s.velocity.norm());
        out.push(self.pitch());
        out.push(self.thrust_per_motor);
        out
    }
}

/// Time-indexed record of one scenario run.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioLog {
    /// Spacing between rows, s.
    pub log_dt: f64,
    /// Leading span excluded from RMS metrics, s.
    pub transient_s: f64,
    pub rows: Vec<LogRow>,
}

impl ScenarioLog {
    /// Covered time span: row count times the row spacing.
    pub fn span(&self) -> f64 {
        self.rows.len() as f64 * self.log_dt
    }

    /// Writes the log as CSV with a [`LOG_COLUMNS`] header.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(LOG_COLUMNS)?;
        for row in &self.rows {
            w.write_record(row.fields().iter().map(|v| v.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}
