//! Simulation and flight control for a dual-rotor tail-sitter micro air vehicle.
//!
//! - [`model`]: propeller and elevon force/torque model
//! - [`sim`]: rigid-body integration, actuator lag, sensors, estimator
//! - [`control`]: cascaded position/attitude/rate control and model-inverse allocation
//! - [`sysid`]: least-squares identification of the aerodynamic constants
//! - [`scenario`]: reference trajectories, closed-loop runs, metrics, configuration

pub mod control;
pub mod error;
pub mod model;
pub mod params;
pub mod scenario;
pub mod sim;
pub mod sysid;

pub use error::{Error, Result};
pub use params::{ControllerGains, VehicleParams};
