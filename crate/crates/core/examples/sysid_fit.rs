//! Identify the aerodynamic constants from synthetic load-cell data.
//!
//! cargo run --example sysid_fit -- [relative_noise] [seed]

use tailsitter::sysid::{default_grids, fit_params, generate_synthetic, Constant, SynthNoise};
use tailsitter::VehicleParams;

fn main() -> tailsitter::Result<()> {
    let mut args = std::env::args().skip(1);
    let noise: f64 = args.next().map(|s| s.parse().expect("noise")).unwrap_or(0.0);
    let seed: u64 = args.next().map(|s| s.parse().expect("seed")).unwrap_or(0);
    let truth = VehicleParams::default();
    let (omega, delta) = default_grids();
    let records = generate_synthetic(&truth, &omega, &delta, SynthNoise { relative: noise }, seed)?;
    let fit = fit_params(&records)?;
    println!("{} records, noise {noise}, seed {seed}", records.len());
    for c in Constant::ALL {
        let f = fit.get(c).unwrap();
        let err = (f.value - c.get(&truth)) / c.get(&truth);
        println!("{:4} = {:.4e}  (true {:.4e}, error {:+.2} %, std error {:.2e})", c.key(), f.value, c.get(&truth), err * 100.0, f.std_error);
    }
    Ok(())
}
