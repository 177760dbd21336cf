//! All four scenarios run in parallel; results come back in input order.

use tailsitter::scenario::{run_sweep, Scenario, SimConfig};

fn main() {
    let configs: Vec<SimConfig> =
        [Scenario::hover(), Scenario::waypoint(), Scenario::circle(), Scenario::star()].into_iter().map(SimConfig::ideal).collect();
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    for (config, result) in configs.iter().zip(run_sweep(&configs, workers)) {
        match result {
            Ok((_, m)) => println!(
                "{:8} rms ({:.3}, {:.3}, {:.4}) m  peak speed {:.2} m/s  latency {:.3} s",
                config.scenario.name(), m.rms_x_m, m.rms_y_m, m.rms_z_m, m.peak_speed_mps, m.latency_s
            ),
            Err(e) => println!("{:8} failed: {e}", config.scenario.name()),
        }
    }
}
