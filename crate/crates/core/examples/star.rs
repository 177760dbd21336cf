//! Pentagram in the horizontal plane, legs through every second vertex.

use tailsitter::scenario::{reference, run_scenario, Scenario, SimConfig};

fn main() -> tailsitter::Result<()> {
    let s = Scenario::star();
    // Vertices are where the reference comes to rest.
    let mut t = 0.0;
    while t <= s.duration {
        let sp = reference(t, &s)?;
        if sp.velocity.norm() == 0.0 && t > 0.0 && reference(t - 0.01, &s)?.velocity.norm() > 0.0 {
            println!("vertex at t {t:5.2}: ({:6.3}, {:6.3})", sp.position.x, sp.position.y);
        }
        t += 0.01;
    }
    let (_, m) = run_scenario(&SimConfig::ideal(s))?;
    println!("rms x {:.3} m  y {:.3} m  z {:.4} m", m.rms_x_m, m.rms_y_m, m.rms_z_m);
    Ok(())
}
