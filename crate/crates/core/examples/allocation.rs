//! Model-inverse allocation of a desired torque and thrust, checked against the forward model.

use nalgebra::Vector3;
use tailsitter::control::model_inverse;
use tailsitter::model::{side_wrench, Side};
use tailsitter::VehicleParams;

fn main() -> tailsitter::Result<()> {
    let p = VehicleParams::default();
    let fa = 0.5 * p.mass * p.g_mag;
    for torque in [Vector3::zeros(), Vector3::new(0.1, 0.0, 0.0), Vector3::new(0.0, 0.05, 0.0), Vector3::new(0.0, 0.0, 0.02)] {
        let a = model_inverse(&torque, fa, &p)?;
        let c = a.command;
        let act = c.as_state();
        let w = side_wrench(&act, Side::Left, &p)? + side_wrench(&act, Side::Right, &p)?;
        println!(
            "m_des {:?} -> omega {:.1}/{:.1} delta {:+.4}/{:+.4}; forward torque {:?} (drag included), thrust {:.4}",
            torque.as_slice(), c.omega_left, c.omega_right, c.delta_left, c.delta_right, w.torque.as_slice(), -w.force.z
        );
    }
    Ok(())
}
