//! Fixed-step plant simulation: rigid-body dynamics, actuator lag, sensors and
//! state estimation.

mod dynamics;
mod estimator;
mod sensors;

pub use dynamics::{actuator_step, applied_wrench, derivative, step, StateDerivative, VehicleState, MAX_STEP};
pub use estimator::{Estimate, Estimator, EstimatorMode, ObserverGains, IMU_CUTOFF_HZ};
pub use sensors::{DisturbanceSpec, LowPass, PoseMeasurement, SensorModel, SensorSample};
