//! Forward then sideways transition between waypoints, speed capped at 1.25 m/s.

use tailsitter::scenario::{run_scenario, Scenario, SimConfig};

fn main() -> tailsitter::Result<()> {
    let (log, m) = run_scenario(&SimConfig::ideal(Scenario::waypoint()))?;
    let ref_peak = log.rows.iter().map(|r| r.reference.velocity.norm()).fold(0.0, f64::max);
    println!("commanded peak speed {ref_peak:.3} m/s, achieved {:.3} m/s", m.peak_speed_mps);
    println!("peak pitch {:.1} deg, latency {:.3} s", m.peak_pitch_rad.to_degrees(), m.latency_s);
    for row in log.rows.iter().step_by(100) {
        let p = row.truth.position;
        println!("t {:5.1}  p ({:6.3}, {:6.3}, {:6.3})  |v| {:.3}", row.time, p.x, p.y, p.z, row.truth.velocity.norm());
    }
    Ok(())
}
