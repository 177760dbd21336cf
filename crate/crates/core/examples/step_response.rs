//! 0.3 m altitude step compared with the second-order design model.

use nalgebra::Vector3;
use tailsitter::scenario::{run_scenario, Scenario, SimConfig};

fn main() -> tailsitter::Result<()> {
    let mut config = SimConfig::ideal(Scenario::hover());
    config.scenario.duration = 6.0;
    config.start_offset = Vector3::new(0.0, 0.0, -0.3);
    let (log, _) = run_scenario(&config)?;

    let g = config.gains;
    let (zeta, wn) = (g.zeta_p_z, 1.0 / g.tau_p_z);
    let wd = wn * (1.0 - zeta * zeta).sqrt();
    let model = |t: f64| 1.0 - (-zeta * wn * t).exp() * ((wd * t).cos() + zeta / (1.0 - zeta * zeta).sqrt() * (wd * t).sin());
    println!("   t   sim    model");
    for row in log.rows.iter().step_by(20).take(16) {
        let sim = 1.0 - (row.reference.position.z - row.truth.position.z) / 0.3;
        println!("{:4.1}  {:.4}  {:.4}", row.time, sim, model(row.time));
    }
    Ok(())
}
