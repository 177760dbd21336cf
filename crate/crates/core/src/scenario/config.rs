//! Flat key-value configuration files.
//!
//! The file is TOML restricted to top-level `key = value` pairs. Airframe and
//! gain keys are required; harness keys fall back to their defaults.

use std::path::Path;

use nalgebra::Vector3;

use crate::control::{tick_divider, LoopRates};
use crate::error::{ConfigIssue, Error, Result};
use crate::params::{ControllerGains, VehicleParams};
use crate::scenario::Scenario;
use crate::sim::{DisturbanceSpec, EstimatorMode};

/// Keys that every configuration file must define.
pub const REQUIRED_KEYS: [&str; 22] = [
    "m", "l", "b", "J_xx", "J_yy", "J_zz", "k_t", "k_m", "k_l", "k_d", "k_p", "tau_p_xy", "tau_p_z", "zeta_p_xy",
    "zeta_p_z", "tau_att", "tau_w_x", "tau_w_y", "tau_w_z", "K_I_w_x", "K_I_w_y", "K_I_w_z",
];

/// Optional keys with built-in defaults.
pub const HARNESS_KEYS: [&str; 33] = [
    "omega_max", "delta_max", "g_mag", "tau_motor", "tau_servo", "physics_hz", "position_hz", "attitude_hz",
    "rate_hz", "imu_hz", "pose_hz", "log_hz", "transient_s", "gyro_std", "accel_std", "pose_pos_std",
    "pose_att_std", "gyro_bias_x", "gyro_bias_y", "gyro_bias_z", "force_offset_x", "force_offset_y",
    "force_offset_z", "torque_offset_x", "torque_offset_y", "torque_offset_z", "seed", "estimator", "scenario",
    "duration", "start_offset_x", "start_offset_y", "start_offset_z",
];

/// Everything needed to run one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub vehicle: VehicleParams,
    pub gains: ControllerGains,
    pub rates: LoopRates,
    pub imu_hz: f64,
    pub pose_hz: f64,
    pub log_hz: f64,
    /// Seconds dropped from the start of the log before computing RMS errors.
    pub transient_s: f64,
    pub estimator: EstimatorMode,
    pub disturbance: DisturbanceSpec,
    pub scenario: Scenario,
    /// Initial displacement of the vehicle from the first reference point, m.
    pub start_offset: Vector3<f64>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            vehicle: VehicleParams::default(),
            gains: ControllerGains::default(),
            rates: LoopRates::default(),
            imu_hz: 1000.0,
            pose_hz: 100.0,
            log_hz: 100.0,
            transient_s: 5.0,
            estimator: EstimatorMode::Complementary,
            disturbance: DisturbanceSpec::default(),
            scenario: Scenario::hover(),
            start_offset: Vector3::zeros(),
        }
    }
}

impl SimConfig {
    /// Noise-free, perfectly estimated variant of the defaults.
    pub fn ideal(scenario: Scenario) -> Self {
        Self {
            estimator: EstimatorMode::Perfect,
            disturbance: DisturbanceSpec::none(),
            scenario,
            ..Self::default()
        }
    }

    /// Physics ticks between IMU samples, pose fixes and log rows.
    pub fn sample_dividers(&self) -> Result<[u64; 3]> {
        let mut issues = Vec::new();
        let mut out = [1; 3];
        for (slot, (key, hz)) in [("imu_hz", self.imu_hz), ("pose_hz", self.pose_hz), ("log_hz", self.log_hz)]
            .into_iter()
            .enumerate()
        {
            match tick_divider(self.rates.physics_hz, hz) {
                Some(n) => out[slot] = n,
                None => issues.push(ConfigIssue::Invalid {
                    key: key.into(),
                    reason: format!("{hz} Hz must divide the physics rate {} Hz", self.rates.physics_hz),
                }),
            }
        }
        if issues.is_empty() {
            Ok(out)
        } else {
            Err(Error::Config(issues))
        }
    }

    /// Checks every field and reports all problems at once.
    pub fn validate(&self) -> Result<()> {
        let mut issues = Vec::new();
        let mut collect = |r: Result<()>| {
            if let Err(Error::Config(mut more)) = r {
                issues.append(&mut more);
            }
        };
        collect(self.vehicle.validate());
        collect(self.gains.validate());
        let physics_hz = self.rates.physics_hz;
        if !(physics_hz.is_finite() && physics_hz > 0.0) || 1.0 / physics_hz > crate::sim::MAX_STEP {
            collect(Err(Error::Config(vec![ConfigIssue::Invalid {
                key: "physics_hz".into(),
                reason: format!("must be at least {} Hz", 1.0 / crate::sim::MAX_STEP),
            }])));
        } else {
            collect(self.rates.dividers().map(|_| ()));
            collect(self.sample_dividers().map(|_| ()));
        }
        let d = &self.disturbance;
        let mut noise = Vec::new();
        for (key, v) in [
            ("gyro_std", d.gyro_std),
            ("accel_std", d.accel_std),
            ("pose_pos_std", d.pose_pos_std),
            ("pose_att_std", d.pose_att_std),
            ("transient_s", self.transient_s),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                noise.push(ConfigIssue::Invalid { key: key.into(), reason: format!("must be non-negative, got {v}") });
            }
        }
        for (key, v) in [
            ("gyro_bias", d.gyro_bias),
            ("force_offset", d.force_offset),
            ("torque_offset", d.torque_offset),
            ("start_offset", self.start_offset),
        ] {
            for (axis, c) in ["x", "y", "z"].iter().zip(v.iter()) {
                if !c.is_finite() {
                    noise.push(ConfigIssue::Invalid { key: format!("{key}_{axis}"), reason: "must be finite".into() });
                }
            }
        }
        collect(Err(Error::Config(noise)));
        collect(Err(Error::Config(self.scenario.issues())));
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(issues))
        }
    }

    /// Parses a configuration file body.
    pub fn parse(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| {
            Error::Config(vec![ConfigIssue::Invalid { key: "<file>".into(), reason: e.message().to_string() }])
        })?;
        let mut reader = Reader { table: &table, issues: Vec::new() };
        for key in table.keys() {
            if !REQUIRED_KEYS.contains(&key.as_str()) && !HARNESS_KEYS.contains(&key.as_str()) {
                reader.issues.push(ConfigIssue::Unknown(key.clone()));
            }
        }

        let d = SimConfig::default();
        let mut r = reader;
        let vehicle = VehicleParams {
            mass: r.required("m"),
            arm: r.required("l"),
            span: r.required("b"),
            inertia: Vector3::new(r.required("J_xx"), r.required("J_yy"), r.required("J_zz")),
            k_thrust: r.required("k_t"),
            k_moment: r.required("k_m"),
            k_lift: r.required("k_l"),
            k_drag: r.required("k_d"),
            k_pitch: r.required("k_p"),
            omega_max: r.optional("omega_max", d.vehicle.omega_max),
            delta_max: r.optional("delta_max", d.vehicle.delta_max),
            g_mag: r.optional("g_mag", d.vehicle.g_mag),
            tau_motor: r.optional("tau_motor", d.vehicle.tau_motor),
            tau_servo: r.optional("tau_servo", d.vehicle.tau_servo),
        };
        let gains = ControllerGains {
            tau_p_xy: r.required("tau_p_xy"),
            tau_p_z: r.required("tau_p_z"),
            zeta_p_xy: r.required("zeta_p_xy"),
            zeta_p_z: r.required("zeta_p_z"),
            tau_att: r.required("tau_att"),
            tau_rate: Vector3::new(r.required("tau_w_x"), r.required("tau_w_y"), r.required("tau_w_z")),
            ki_rate: Vector3::new(r.required("K_I_w_x"), r.required("K_I_w_y"), r.required("K_I_w_z")),
        };
        let rates = LoopRates {
            physics_hz: r.optional("physics_hz", d.rates.physics_hz),
            position_hz: r.optional("position_hz", d.rates.position_hz),
            attitude_hz: r.optional("attitude_hz", d.rates.attitude_hz),
            rate_hz: r.optional("rate_hz", d.rates.rate_hz),
        };
        let dd = d.disturbance;
        let disturbance = DisturbanceSpec {
            force_offset: r.vector("force_offset", dd.force_offset),
            torque_offset: r.vector("torque_offset", dd.torque_offset),
            gyro_bias: r.vector("gyro_bias", dd.gyro_bias),
            gyro_std: r.optional("gyro_std", dd.gyro_std),
            accel_std: r.optional("accel_std", dd.accel_std),
            pose_pos_std: r.optional("pose_pos_std", dd.pose_pos_std),
            pose_att_std: r.optional("pose_att_std", dd.pose_att_std),
            seed: r.seed(dd.seed),
        };
        let estimator = match r.string("estimator").as_deref() {
            None => d.estimator,
            Some(name) => parse_estimator(name).unwrap_or_else(|| {
                r.issues.push(ConfigIssue::Invalid {
                    key: "estimator".into(),
                    reason: format!("expected `perfect` or `complementary`, got `{name}`"),
                });
                d.estimator
            }),
        };
        let mut scenario = match r.string("scenario").as_deref() {
            None => d.scenario.clone(),
            Some(name) => Scenario::by_name(name).unwrap_or_else(|| {
                r.issues.push(ConfigIssue::Invalid {
                    key: "scenario".into(),
                    reason: format!("expected hover, waypoint, circle or star, got `{name}`"),
                });
                d.scenario.clone()
            }),
        };
        scenario.duration = r.optional("duration", scenario.duration);

        let config = SimConfig {
            vehicle,
            gains,
            rates,
            imu_hz: r.optional("imu_hz", d.imu_hz),
            pose_hz: r.optional("pose_hz", d.pose_hz),
            log_hz: r.optional("log_hz", d.log_hz),
            transient_s: r.optional("transient_s", d.transient_s),
            estimator,
            disturbance,
            scenario,
            start_offset: r.vector("start_offset", d.start_offset),
        };
        let mut issues = r.issues;
        if let Err(Error::Config(mut more)) = config.validate() {
            // Missing keys already explain any defaulted zeros.
            more.retain(|i| !matches!(i, ConfigIssue::Invalid { key, .. } if issues.contains(&ConfigIssue::Missing(key.clone()))));
            issues.append(&mut more);
        }
        if issues.is_empty() {
            Ok(config)
        } else {
            Err(Error::Config(issues))
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Renders the configuration in the file format accepted by [`SimConfig::parse`].
    pub fn to_file_string(&self) -> String {
        let v = &self.vehicle;
        let g = &self.gains;
        let d = &self.disturbance;
        let mut out = String::from("# Airframe\n");
        let put = |out: &mut String, key: &str, value: f64| out.push_str(&format!("{key} = {}\n", fmt(value)));
        for (key, value) in [
            ("m", v.mass),
            ("l", v.arm),
            ("b", v.span),
            ("J_xx", v.inertia.x),
            ("J_yy", v.inertia.y),
            ("J_zz", v.inertia.z),
            ("k_t", v.k_thrust),
            ("k_m", v.k_moment),
            ("k_l", v.k_lift),
            ("k_d", v.k_drag),
            ("k_p", v.k_pitch),
        ] {
            put(&mut out, key, value);
        }
        out.push_str("\n# Controller\n");
        for (key, value) in [
            ("tau_p_xy", g.tau_p_xy),
            ("tau_p_z", g.tau_p_z),
            ("zeta_p_xy", g.zeta_p_xy),
            ("zeta_p_z", g.zeta_p_z),
            ("tau_att", g.tau_att),
            ("tau_w_x", g.tau_rate.x),
            ("tau_w_y", g.tau_rate.y),
            ("tau_w_z", g.tau_rate.z),
            ("K_I_w_x", g.ki_rate.x),
            ("K_I_w_y", g.ki_rate.y),
            ("K_I_w_z", g.ki_rate.z),
        ] {
            put(&mut out, key, value);
        }
        out.push_str("\n# Actuators and environment\n");
        for (key, value) in [
            ("omega_max", v.omega_max),
            ("delta_max", v.delta_max),
            ("g_mag", v.g_mag),
            ("tau_motor", v.tau_motor),
            ("tau_servo", v.tau_servo),
        ] {
            put(&mut out, key, value);
        }
        out.push_str("\n# Loop and sensor rates, Hz\n");
        for (key, value) in [
            ("physics_hz", self.rates.physics_hz),
            ("position_hz", self.rates.position_hz),
            ("attitude_hz", self.rates.attitude_hz),
            ("rate_hz", self.rates.rate_hz),
            ("imu_hz", self.imu_hz),
            ("pose_hz", self.pose_hz),
            ("log_hz", self.log_hz),
        ] {
            put(&mut out, key, value);
        }
        out.push_str("\n# Noise and disturbances\n");
        for (key, value) in [
            ("gyro_std", d.gyro_std),
            ("accel_std", d.accel_std),
            ("pose_pos_std", d.pose_pos_std),
            ("pose_att_std", d.pose_att_std),
        ] {
            put(&mut out, key, value);
        }
        for (key, value) in [("gyro_bias", d.gyro_bias), ("force_offset", d.force_offset), ("torque_offset", d.torque_offset)]
        {
            for (axis, c) in ["x", "y", "z"].iter().zip(value.iter()) {
                put(&mut out, &format!("{key}_{axis}"), *c);
            }
        }
        out.push_str(&format!("seed = {}\n", d.seed));
        out.push_str("\n# Run\n");
        out.push_str(&format!("estimator = \"{}\"\n", estimator_name(self.estimator)));
        out.push_str(&format!("scenario = \"{}\"\n", self.scenario.name()));
        put(&mut out, "duration", self.scenario.duration);
        for (axis, c) in ["x", "y", "z"].iter().zip(self.start_offset.iter()) {
            put(&mut out, &format!("start_offset_{axis}"), *c);
        }
        put(&mut out, "transient_s", self.transient_s);
        out
    }
}

fn fmt(value: f64) -> String {
    // Always keep a decimal point or exponent so the value reads back as a float.
    let s = format!("{value:?}");
    if s.contains(['.', 'e', 'E']) || !value.is_finite() {
        s
    } else {
        format!("{s}.0")
    }
}

pub fn parse_estimator(name: &str) -> Option<EstimatorMode> {
    match name {
        "perfect" => Some(EstimatorMode::Perfect),
        "complementary" => Some(EstimatorMode::Complementary),
        _ => None,
    }
}

pub fn estimator_name(mode: EstimatorMode) -> &'static str {
    match mode {
        EstimatorMode::Perfect => "perfect",
        EstimatorMode::Complementary => "complementary",
    }
}

struct Reader<'a> {
    table: &'a toml::Table,
    issues: Vec<ConfigIssue>,
}

impl Reader<'_> {
    fn number(&mut self, key: &str) -> Option<f64> {
        match self.table.get(key)? {
            toml::Value::Float(x) => Some(*x),
            toml::Value::Integer(i) => Some(*i as f64),
            other => {
                self.issues.push(ConfigIssue::Invalid {
                    key: key.into(),
                    reason: format!("expected a number, got {}", other.type_str()),
                });
                None
            }
        }
    }

    fn required(&mut self, key: &str) -> f64 {
        if !self.table.contains_key(key) {
            self.issues.push(ConfigIssue::Missing(key.into()));
            return 0.0;
        }
        self.number(key).unwrap_or(f64::NAN)
    }

    fn optional(&mut self, key: &str, default: f64) -> f64 {
        self.number(key).unwrap_or(default)
    }

    fn vector(&mut self, prefix: &str, default: Vector3<f64>) -> Vector3<f64> {
        Vector3::new(
            self.optional(&format!("{prefix}_x"), default.x),
            self.optional(&format!("{prefix}_y"), default.y),
            self.optional(&format!("{prefix}_z"), default.z),
        )
    }

    fn seed(&mut self, default: u64) -> u64 {
        match self.table.get("seed") {
            None => default,
            Some(toml::Value::Integer(i)) if *i >= 0 => *i as u64,
            Some(_) => {
                self.issues.push(ConfigIssue::Invalid { key: "seed".into(), reason: "expected a non-negative integer".into() });
                default
            }
        }
    }

    fn string(&mut self, key: &str) -> Option<String> {
        match self.table.get(key)? {
            toml::Value::String(s) => Some(s.clone()),
            other => {
                self.issues.push(ConfigIssue::Invalid {
                    key: key.into(),
                    reason: format!("expected a string, got {}", other.type_str()),
                });
                None
            }
        }
    }
}
