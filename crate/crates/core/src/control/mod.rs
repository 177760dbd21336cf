//! Cascaded position, attitude and rate control with model-inverse allocation.

mod allocation;
mod attitude;
mod cascade;
mod position;
mod rate;

pub use allocation::{clamp_roll, model_inverse, saturate, Allocation, SaturationFlags, ROLL_MARGIN};
pub use attitude::{attitude_control, attitude_setpoint, error_angles, AttitudeTarget, MIN_THRUST};
pub use cascade::{tick_divider, Cascade, CascadeFlags, CascadeOutputs, LoopRates};
pub use position::{position_control, wrap_angle, Setpoint};
pub use rate::{rate_control, RateIntegral};
