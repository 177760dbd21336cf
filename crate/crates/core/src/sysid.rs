//! Least-squares identification of the propeller and elevon constants from
//! static load-cell records.
//!
//! Each record is one sample of a single rotor/elevon unit mounted on a
//! six-axis load cell, expressed in the unit's own frame (the left-side
//! convention: reaction torque +k_m·ω² about z). The model is linear in the
//! constants:
//!
//! | channel | regressors          | constants |
//! |---------|---------------------|-----------|
//! | fz      | -ω², ω²δ²           | k_t, k_d  |
//! | mz      | ω²                  | k_m       |
//! | fx      | -ω²δ                | k_l       |
//! | my      | -ω²δ                | k_p       |
//!
//! All regressions pass through the origin unless [`FitOptions::intercept`] is set.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{aero_wrench, prop_wrench, Side};
use crate::params::VehicleParams;

/// One load-cell sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaticTestRecord {
    pub omega: f64,
    pub delta: f64,
    pub force: Vector3<f64>,
    pub torque: Vector3<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    omega_rad_s: f64,
    delta_rad: f64,
    fx: f64,
    fy: f64,
    fz: f64,
    mx: f64,
    my: f64,
    mz: f64,
}

impl From<&StaticTestRecord> for CsvRow {
    fn from(r: &StaticTestRecord) -> Self {
        CsvRow {
            omega_rad_s: r.omega,
            delta_rad: r.delta,
            fx: r.force.x,
            fy: r.force.y,
            fz: r.force.z,
            mx: r.torque.x,
            my: r.torque.y,
            mz: r.torque.z,
        }
    }
}

impl From<CsvRow> for StaticTestRecord {
    fn from(r: CsvRow) -> Self {
        StaticTestRecord {
            omega: r.omega_rad_s,
            delta: r.delta_rad,
            force: Vector3::new(r.fx, r.fy, r.fz),
            torque: Vector3::new(r.mx, r.my, r.mz),
        }
    }
}

/// Writes records as CSV with header `omega_rad_s,delta_rad,fx,fy,fz,mx,my,mz`.
pub fn write_records<W: Write>(records: &[StaticTestRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(CsvRow::from(r))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads records written by [`write_records`]; surrounding whitespace is ignored.
pub fn read_records<R: Read>(input: R) -> Result<Vec<StaticTestRecord>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let mut out = Vec::new();
    for row in r.deserialize::<CsvRow>() {
        let rec = StaticTestRecord::from(row?);
        if !(rec.omega >= 0.0) || !rec.delta.is_finite() || !rec.force.iter().chain(rec.torque.iter()).all(|v| v.is_finite()) {
            return Err(Error::Domain(format!("invalid static-test record {rec:?}")));
        }
        out.push(rec);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Constant {
    Thrust,
    Moment,
    Lift,
    Drag,
    Pitch,
}

impl Constant {
    pub const ALL: [Constant; 5] = [Constant::Thrust, Constant::Moment, Constant::Lift, Constant::Drag, Constant::Pitch];

    /// Parameter-file key.
    pub fn key(self) -> &'static str {
        match self {
            Constant::Thrust => "k_t",
            Constant::Moment => "k_m",
            Constant::Lift => "k_l",
            Constant::Drag => "k_d",
            Constant::Pitch => "k_p",
        }
    }

    pub fn get(self, params: &VehicleParams) -> f64 {
        match self {
            Constant::Thrust => params.k_thrust,
            Constant::Moment => params.k_moment,
            Constant::Lift => params.k_lift,
            Constant::Drag => params.k_drag,
            Constant::Pitch => params.k_pitch,
        }
    }

    pub fn set(self, params: &mut VehicleParams, value: f64) {
        match self {
            Constant::Thrust => params.k_thrust = value,
            Constant::Moment => params.k_moment = value,
            Constant::Lift => params.k_lift = value,
            Constant::Drag => params.k_drag = value,
            Constant::Pitch => params.k_pitch = value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantFit {
    pub value: f64,
    /// RMS residual of the channel the constant was fitted on.
    pub residual_rms: f64,
    pub std_error: f64,
    /// Fitted intercept of the channel, when requested.
    pub bias: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FitResult {
    pub fits: BTreeMap<Constant, ConstantFit>,
    /// Constants the data could not excite.
    pub unidentified: Vec<Constant>,
}

impl FitResult {
    pub fn get(&self, c: Constant) -> Option<&ConstantFit> {
        self.fits.get(&c)
    }

    /// Copies the fitted constants into `base`; fails if any constant is unidentified.
    pub fn apply_to(&self, base: &VehicleParams) -> Result<VehicleParams> {
        if !self.unidentified.is_empty() {
            return Err(Error::InsufficientExcitation(self.unidentified.iter().map(|c| c.key()).collect()));
        }
        let mut p = *base;
        for (c, fit) in &self.fits {
            c.set(&mut p, fit.value);
        }
        Ok(p)
    }

    /// Flat `key = value` parameter text; fit statistics go in comments.
    pub fn to_param_file(&self) -> String {
        let mut s = String::from("# identified from static-test records\n");
        for (c, fit) in &self.fits {
            let _ = writeln!(
                s,
                "# {}: residual_rms = {:e}, std_error = {:e}{}",
                c.key(),
                fit.residual_rms,
                fit.std_error,
                fit.bias.map(|b| format!(", bias = {b:e}")).unwrap_or_default()
            );
        }
        for (c, fit) in &self.fits {
            let _ = writeln!(s, "{} = {:e}", c.key(), fit.value);
        }
        for c in &self.unidentified {
            let _ = writeln!(s, "# {}: insufficient excitation", c.key());
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FitOptions {
    /// Adds a constant column to every regression and reports it as `bias`.
    pub intercept: bool,
}

struct Regression {
    coefs: Vec<Option<(f64, f64)>>,
    residual_rms: f64,
    bias: Option<f64>,
}

/// Least squares through a QR factorisation. Columns whose diagonal of R is
/// negligible are reported as unidentified (`None`) and dropped from the fit.
fn regress(columns: &[Vec<f64>], y: &[f64], intercept: bool) -> Regression {
    let n = y.len();
    let mut cols: Vec<Vec<f64>> = columns.to_vec();
    if intercept {
        cols.push(vec![1.0; n]);
    }
    // Drop columns with no excitation before factorising.
    let active: Vec<usize> = (0..cols.len()).filter(|&j| cols[j].iter().any(|&v| v != 0.0)).collect();
    let mut coefs: Vec<Option<(f64, f64)>> = vec![None; columns.len()];
    let y_vec = DVector::from_column_slice(y);
    if active.is_empty() {
        let rms = (y_vec.norm_squared() / n as f64).sqrt();
        return Regression { coefs, residual_rms: rms, bias: None };
    }
    let a = DMatrix::from_fn(n, active.len(), |i, j| cols[active[j]][i]);
    let qr = a.clone().qr();
    let r = qr.r();
    let rmax = (0..active.len()).map(|j| r[(j, j)].abs()).fold(0.0, f64::max);
    if (0..active.len()).any(|j| r[(j, j)].abs() <= 1e-10 * rmax) {
        // Collinear columns: treat the whole channel as unidentified.
        let rms = (y_vec.norm_squared() / n as f64).sqrt();
        return Regression { coefs, residual_rms: rms, bias: None };
    }
    let qty = qr.q().transpose() * &y_vec;
    let beta = r.solve_upper_triangular(&qty).expect("non-singular R");
    let resid = &y_vec - &a * &beta;
    let rss = resid.norm_squared();
    let p = active.len();
    let sigma2 = if n > p { rss / (n - p) as f64 } else { 0.0 };
    let r_inv = r.solve_upper_triangular(&DMatrix::identity(p, p)).expect("non-singular R");
    let cov_diag: Vec<f64> = (0..p).map(|j| r_inv.row(j).norm_squared() * sigma2).collect();
    let mut bias = None;
    for (k, &j) in active.iter().enumerate() {
        if j < columns.len() {
            coefs[j] = Some((beta[k], cov_diag[k].sqrt()));
        } else {
            bias = Some(beta[k]);
        }
    }
    Regression { coefs, residual_rms: (rss / n as f64).sqrt(), bias }
}

pub fn fit_params(records: &[StaticTestRecord]) -> Result<FitResult> {
    fit_params_with(records, FitOptions::default())
}

pub fn fit_params_with(records: &[StaticTestRecord], options: FitOptions) -> Result<FitResult> {
    let mut omegas: Vec<f64> = records.iter().map(|r| r.omega).collect();
    omegas.sort_by(f64::total_cmp);
    omegas.dedup();
    if omegas.len() < 2 {
        return Err(Error::Domain(format!(
            "need at least two distinct propeller speeds, got {}",
            omegas.len()
        )));
    }
    let w2: Vec<f64> = records.iter().map(|r| r.omega * r.omega).collect();
    let col = |f: &dyn Fn(&StaticTestRecord, f64) -> f64| -> Vec<f64> {
        records.iter().zip(&w2).map(|(r, &w)| f(r, w)).collect()
    };
    let channel = |f: &dyn Fn(&StaticTestRecord) -> f64| -> Vec<f64> { records.iter().map(f).collect() };

    let mut result = FitResult::default();
    let mut record = |c: Constant, reg: &Regression, idx: usize| match reg.coefs[idx] {
        Some((value, std_error)) => {
            result.fits.insert(c, ConstantFit { value, residual_rms: reg.residual_rms, std_error, bias: reg.bias });
        }
        None => result.unidentified.push(c),
    };

    let vertical = regress(
        &[col(&|_, w| -w), col(&|r, w| w * r.delta * r.delta)],
        &channel(&|r| r.force.z),
        options.intercept,
    );
    record(Constant::Thrust, &vertical, 0);
    let yaw = regress(&[col(&|_, w| w)], &channel(&|r| r.torque.z), options.intercept);
    record(Constant::Moment, &yaw, 0);
    let lift = regress(&[col(&|r, w| -w * r.delta)], &channel(&|r| r.force.x), options.intercept);
    record(Constant::Lift, &lift, 0);
    record(Constant::Drag, &vertical, 1);
    let pitch = regress(&[col(&|r, w| -w * r.delta)], &channel(&|r| r.torque.y), options.intercept);
    record(Constant::Pitch, &pitch, 0);

    result.unidentified.sort();
    Ok(result)
}

/// Multiplicative Gaussian noise applied independently to every measured component.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SynthNoise {
    pub relative: f64,
}

/// Default measurement grid: 6 speeds in [300, 790] rad/s and 9 deflections in [-0.4, 0.4] rad.
pub fn default_grids() -> (Vec<f64>, Vec<f64>) {
    let lin = |a: f64, b: f64, n: usize| -> Vec<f64> {
        (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
    };
    (lin(300.0, 790.0, 6), lin(-0.4, 0.4, 9))
}

/// Evaluates the left-unit model over the grid and perturbs each component.
pub fn generate_synthetic(
    params: &VehicleParams,
    omega_grid: &[f64],
    delta_grid: &[f64],
    noise: SynthNoise,
    seed: u64,
) -> Result<Vec<StaticTestRecord>> {
    if omega_grid.is_empty() || delta_grid.is_empty() {
        return Err(Error::Domain("measurement grids must be nonempty".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(omega_grid.len() * delta_grid.len());
    for &omega in omega_grid {
        for &delta in delta_grid {
            let w = prop_wrench(omega, Side::Left, params)? + aero_wrench(omega, delta, params)?;
            let mut perturb = |v: Vector3<f64>| -> Vector3<f64> {
                v.map(|x| {
                    let e: f64 = StandardNormal.sample(&mut rng);
                    x * (1.0 + noise.relative * e)
                })
            };
            let force = perturb(w.force);
            let torque = perturb(w.torque);
            out.push(StaticTestRecord { omega, delta, force, torque });
        }
    }
    Ok(out)
}
