//! Circle of radius 1.5 m at 1.5 m/s with the nose along the path; writes the log as CSV.
//!
//! cargo run --example circle -- [out.csv]

use std::fs::File;
use std::io::BufWriter;

use nalgebra::Vector3;
use tailsitter::scenario::{run_scenario, Scenario, SimConfig};

fn main() -> tailsitter::Result<()> {
    let (log, m) = run_scenario(&SimConfig::ideal(Scenario::circle()))?;
    let center = Vector3::new(0.0, 0.0, 1.5);
    let tail: Vec<f64> = log.rows.iter().filter(|r| r.time > 20.0).map(|r| (r.truth.position - center).xy().norm()).collect();
    println!("achieved radius {:.3} m (reference 1.5)", tail.iter().sum::<f64>() / tail.len() as f64);
    println!("{}", m.to_json()?);
    if let Some(path) = std::env::args().nth(1) {
        log.write_csv(BufWriter::new(File::create(&path)?))?;
        println!("log written to {path}");
    }
    Ok(())
}
