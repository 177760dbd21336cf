//! Load, validate and edit a configuration file.
//!
//! cargo run --example config_file -- [path]

use tailsitter::scenario::SimConfig;

fn main() {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/config/default.toml").into());
    match SimConfig::load(&path) {
        Ok(mut config) => {
            println!("{path}: valid, scenario {} for {} s", config.scenario.name(), config.scenario.duration);
            config.vehicle.mass = 0.7;
            config.disturbance.seed = 3;
            print!("{}", config.to_file_string());
        }
        Err(e) => {
            eprintln!("{path}: {e}");
            std::process::exit(1);
        }
    }
}
