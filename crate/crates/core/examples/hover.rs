//! One minute of hover with sensor noise and the complementary estimator.
//!
//! cargo run --example hover -- [seed]

use tailsitter::scenario::{run_scenario, SimConfig};

fn main() -> tailsitter::Result<()> {
    let mut config = SimConfig::default();
    if let Some(seed) = std::env::args().nth(1) {
        config.disturbance.seed = seed.parse().expect("seed must be an integer");
    }
    let (log, m) = run_scenario(&config)?;
    let last = log.rows.last().unwrap();
    println!("rms error x {:.2} mm  y {:.2} mm  z {:.2} mm", m.rms_x_m * 1e3, m.rms_y_m * 1e3, m.rms_z_m * 1e3);
    println!("peak pitch {:.2} deg", m.peak_pitch_rad.to_degrees());
    let a = last.truth.actuators;
    println!("final omega {:.1} / {:.1} rad/s, delta {:.4} / {:.4} rad", a.omega_left, a.omega_right, a.delta_left, a.delta_right);
    Ok(())
}
