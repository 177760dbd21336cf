use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::ScenarioLog;

/// Reference axes with less spread than this are treated as stationary for latency.
const MOVING_STD: f64 = 1e-3;
/// Longest delay searched by the latency estimate, s.
const MAX_LATENCY: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub rms_x_m: f64,
    pub rms_y_m: f64,
    pub rms_z_m: f64,
    pub peak_err_x_m: f64,
    pub peak_err_y_m: f64,
    pub peak_err_z_m: f64,
    pub peak_pitch_rad: f64,
    pub peak_speed_mps: f64,
    /// Mean over moving axes of the reference-to-response delay; 0 when nothing moves.
    pub latency_s: f64,
}

impl Metrics {
    pub fn rms(&self) -> [f64; 3] {
        [self.rms_x_m, self.rms_y_m, self.rms_z_m]
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Summarises a log: RMS errors after the transient window, peaks over the whole log.
pub fn metrics(log: &ScenarioLog) -> Result<Metrics> {
    if log.rows.is_empty() {
        return Err(Error::Domain("empty log".into()));
    }
    let span = log.span();
    if span <= log.transient_s {
        return Err(Error::MetricsWindow { span, window: log.transient_s });
    }
    // Rows logged at or after the transient window; a tolerance absorbs tick rounding.
    let first = log.rows.iter().position(|r| r.time >= log.transient_s - 1e-9 * log.log_dt.max(1.0)).unwrap_or(0);
    let window = &log.rows[first..];

    let mut rms = [0.0; 3];
    for row in window {
        let e = row.error();
        for k in 0..3 {
            rms[k] += e[k] * e[k];
        }
    }
    let rms = rms.map(|s| (s / window.len() as f64).sqrt());

    let mut peak = [0.0f64; 3];
    let mut peak_pitch = 0.0f64;
    let mut peak_speed = 0.0f64;
    for row in &log.rows {
        let e = row.error();
        for k in 0..3 {
            peak[k] = peak[k].max(e[k].abs());
        }
        peak_pitch = peak_pitch.max(row.pitch().abs());
        peak_speed = peak_speed.max(row.truth.velocity.norm());
    }

    let mut lags = Vec::new();
    for k in 0..3 {
        let reference: Vec<f64> = window.iter().map(|r| r.reference.position[k]).collect();
        let response: Vec<f64> = window.iter().map(|r| r.truth.position[k]).collect();
        if let Some(lag) = delay(&reference, &response, log.log_dt) {
            lags.push(lag);
        }
    }
    let latency_s = if lags.is_empty() { 0.0 } else { lags.iter().sum::<f64>() / lags.len() as f64 };

    Ok(Metrics {
        rms_x_m: rms[0],
        rms_y_m: rms[1],
        rms_z_m: rms[2],
        peak_err_x_m: peak[0],
        peak_err_y_m: peak[1],
        peak_err_z_m: peak[2],
        peak_pitch_rad: peak_pitch,
        peak_speed_mps: peak_speed,
        latency_s,
    })
}

fn std_dev(x: &[f64]) -> f64 {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / x.len() as f64).sqrt()
}

/// Pearson correlation of two equal-length slices.
fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut ab, mut aa, mut bb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (x, y) = (x - ma, y - mb);
        ab += x * y;
        aa += x * x;
        bb += y * y;
    }
    if aa == 0.0 || bb == 0.0 {
        0.0
    } else {
        ab / (aa * bb).sqrt()
    }
}

/// Delay of `response` behind `reference` at the cross-correlation peak,
/// refined by a parabola through the peak and its neighbours. `None` for a
/// stationary reference.
///
/// Each lag is scored by the correlation coefficient of the overlapping parts,
/// so slow trends near the window edges do not bias the peak.
pub fn delay(reference: &[f64], response: &[f64], dt: f64) -> Option<f64> {
    let n = reference.len().min(response.len());
    if n < 4 || std_dev(&reference[..n]) < MOVING_STD {
        return None;
    }
    let max_lag = ((MAX_LATENCY / dt).round() as usize).min(n / 2);
    let c: Vec<f64> = (0..=max_lag).map(|lag| pearson(&reference[..n - lag], &response[lag..n])).collect();
    let (best, _) = c.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let mut shift = 0.0;
    if best > 0 && best < max_lag {
        let (a, b, d) = (c[best - 1], c[best], c[best + 1]);
        let denom = a - 2.0 * b + d;
        if denom < 0.0 {
            shift = 0.5 * (a - d) / denom;
        }
    }
    Some((best as f64 + shift) * dt)
}
