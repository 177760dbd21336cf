use nalgebra::{UnitQuaternion, Vector3};

use crate::control::{
    attitude_control, attitude_setpoint, clamp_roll, model_inverse, position_control, rate_control, RateIntegral,
    SaturationFlags, Setpoint, MIN_THRUST,
};
use crate::error::{ConfigIssue, Error, Result};
use crate::model::{hover_attitude, ActuatorCommand};
use crate::params::{ControllerGains, VehicleParams};
use crate::sim::Estimate;

/// Execution rates of the three loops relative to the physics clock, Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopRates {
    pub physics_hz: f64,
    pub position_hz: f64,
    pub attitude_hz: f64,
    pub rate_hz: f64,
}

impl Default for LoopRates {
    fn default() -> Self {
        Self { physics_hz: 2000.0, position_hz: 100.0, attitude_hz: 250.0, rate_hz: 500.0 }
    }
}

/// Number of physics ticks between runs of a loop at `hz`, if it divides evenly.
pub fn tick_divider(physics_hz: f64, hz: f64) -> Option<u64> {
    if !(hz > 0.0 && physics_hz > 0.0) {
        return None;
    }
    let ratio = physics_hz / hz;
    let n = ratio.round();
    ((ratio - n).abs() < 1e-9 && n >= 1.0).then_some(n as u64)
}

impl LoopRates {
    pub fn dividers(&self) -> Result<[u64; 3]> {
        let mut issues = Vec::new();
        let mut out = [1; 3];
        for (slot, (key, hz)) in
            [("position_hz", self.position_hz), ("attitude_hz", self.attitude_hz), ("rate_hz", self.rate_hz)]
                .into_iter()
                .enumerate()
        {
            match tick_divider(self.physics_hz, hz) {
                Some(n) => out[slot] = n,
                None => issues.push(ConfigIssue::Invalid {
                    key: key.to_string(),
                    reason: format!("{hz} Hz must divide the physics rate {} Hz", self.physics_hz),
                }),
            }
        }
        if issues.is_empty() {
            Ok(out)
        } else {
            Err(Error::Config(issues))
        }
    }
}

/// Diagnostic flags raised by the most recent allocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CascadeFlags {
    pub saturation: SaturationFlags,
    pub roll_clamped: bool,
    pub thrust_degenerate: bool,
}

/// Latched outputs of every stage, for logging.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeOutputs {
    pub force_des: Vector3<f64>,
    pub attitude_des: UnitQuaternion<f64>,
    pub thrust_per_motor: f64,
    pub rate_des: Vector3<f64>,
    pub torque_des: Vector3<f64>,
    pub command: ActuatorCommand,
    pub flags: CascadeFlags,
}

/// Position → attitude → rate → allocation, each stage run on its own clock
/// and holding its last output between runs.
#[derive(Debug, Clone)]
pub struct Cascade {
    params: VehicleParams,
    gains: ControllerGains,
    dividers: [u64; 3],
    rate_dt: f64,
    integral: RateIntegral,
    out: CascadeOutputs,
}

impl Cascade {
    pub fn new(params: VehicleParams, gains: ControllerGains, rates: LoopRates) -> Result<Self> {
        let dividers = rates.dividers()?;
        let hover_force = -params.gravity_world() * params.mass;
        let hover = crate::model::ActuatorState::hover(&params);
        Ok(Self {
            params,
            gains,
            dividers,
            rate_dt: dividers[2] as f64 / rates.physics_hz,
            integral: RateIntegral::default(),
            out: CascadeOutputs {
                force_des: hover_force,
                attitude_des: hover_attitude(0.0),
                thrust_per_motor: 0.5 * hover_force.norm(),
                rate_des: Vector3::zeros(),
                torque_des: Vector3::zeros(),
                command: ActuatorCommand::from_state(&hover),
                flags: CascadeFlags::default(),
            },
        })
    }

    pub fn outputs(&self) -> &CascadeOutputs {
        &self.out
    }

    pub fn integral(&self) -> RateIntegral {
        self.integral
    }

    /// Runs whichever stages are due on physics tick `tick` and returns the latest command.
    pub fn update(&mut self, tick: u64, estimate: &Estimate, setpoint: &Setpoint) -> Result<ActuatorCommand> {
        let [pos_div, att_div, rate_div] = self.dividers;
        let p = &self.params;

        if tick % pos_div == 0 {
            self.out.force_des = position_control(setpoint, &estimate.position, &estimate.velocity, &self.gains, p);
        }

        if tick % att_div == 0 {
            match attitude_setpoint(&self.out.force_des, setpoint.heading) {
                Ok(target) => {
                    self.out.attitude_des = target.attitude;
                    self.out.thrust_per_motor = target.thrust_per_motor;
                    self.out.flags.thrust_degenerate = false;
                }
                Err(Error::DegenerateThrust { .. }) => {
                    // Hold the last attitude and idle at the thrust floor.
                    self.out.thrust_per_motor = 0.5 * MIN_THRUST;
                    self.out.flags.thrust_degenerate = true;
                }
                Err(e) => return Err(e),
            }
            self.out.rate_des = attitude_control(&estimate.attitude, &self.out.attitude_des, self.gains.tau_att);
        }

        if tick % rate_div == 0 {
            let freeze = self.out.flags.saturation.any() || self.out.flags.roll_clamped;
            let mut torque = rate_control(
                &estimate.rate,
                &self.out.rate_des,
                &mut self.integral,
                self.rate_dt,
                &self.gains,
                &p.inertia,
                freeze,
            );
            let (m_x, roll_clamped) = clamp_roll(torque.x, self.out.thrust_per_motor, p);
            torque.x = m_x;
            let alloc = model_inverse(&torque, self.out.thrust_per_motor, p)?;
            self.out.torque_des = torque;
            self.out.command = alloc.command;
            self.out.flags.saturation = alloc.saturation;
            self.out.flags.roll_clamped = roll_clamped;
        }

        Ok(self.out.command)
    }
}
