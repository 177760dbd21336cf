//! Reference trajectories for the flight scenarios.

use std::f64::consts::PI;

use nalgebra::Vector3;

use crate::control::Setpoint;
use crate::error::{ConfigIssue, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum YawProfile {
    Constant(f64),
    /// Heading along the reference velocity (tangent of a circle).
    FollowVelocity,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioKind {
    Hover {
        position: Vector3<f64>,
    },
    /// Straight legs between waypoints with trapezoidal speed profiles, resting
    /// `dwell` seconds at each waypoint (including before the first leg).
    Waypoint {
        waypoints: Vec<Vector3<f64>>,
        max_speed: f64,
        max_accel: f64,
        dwell: f64,
    },
    Circle {
        center: Vector3<f64>,
        radius: f64,
        speed: f64,
    },
    /// Star polygon in the horizontal plane: `vertices` points on a circle,
    /// legs joining every second vertex.
    Star {
        center: Vector3<f64>,
        vertices: usize,
        circumradius: f64,
        speed: f64,
        max_accel: f64,
        dwell: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    /// s
    pub duration: f64,
    pub yaw: YawProfile,
}

impl Scenario {
    /// Hover in place at 1.5 m for one minute.
    pub fn hover() -> Self {
        Self {
            kind: ScenarioKind::Hover { position: Vector3::new(0.0, 0.0, 1.5) },
            duration: 60.0,
            yaw: YawProfile::Constant(0.0),
        }
    }

    /// A forward (pitch) transition followed by a sideways (roll) transition.
    pub fn waypoint() -> Self {
        Self {
            kind: ScenarioKind::Waypoint {
                waypoints: vec![
                    Vector3::new(0.0, 0.0, 1.5),
                    Vector3::new(2.5, 0.0, 1.5),
                    Vector3::new(2.5, 2.5, 1.5),
                ],
                max_speed: 1.25,
                max_accel: 1.0,
                dwell: 3.0,
            },
            duration: 20.0,
            yaw: YawProfile::Constant(0.0),
        }
    }

    /// 1.5 m radius at 1.5 m/s, nose along the path.
    pub fn circle() -> Self {
        Self {
            kind: ScenarioKind::Circle { center: Vector3::new(0.0, 0.0, 1.5), radius: 1.5, speed: 1.5 },
            duration: 40.0,
            yaw: YawProfile::FollowVelocity,
        }
    }

    /// Pentagram of circumradius 1.5 m flown at 1.25 m/s.
    pub fn star() -> Self {
        Self {
            kind: ScenarioKind::Star {
                center: Vector3::new(0.0, 0.0, 1.5),
                vertices: 5,
                circumradius: 1.5,
                speed: 1.25,
                max_accel: 1.0,
                dwell: 1.0,
            },
            duration: 30.0,
            yaw: YawProfile::Constant(0.0),
        }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "hover" => Some(Self::hover()),
            "waypoint" => Some(Self::waypoint()),
            "circle" => Some(Self::circle()),
            "star" => Some(Self::star()),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            ScenarioKind::Hover { .. } => "hover",
            ScenarioKind::Waypoint { .. } => "waypoint",
            ScenarioKind::Circle { .. } => "circle",
            ScenarioKind::Star { .. } => "star",
        }
    }

    /// Largest speed the reference ever commands.
    pub fn speed_limit(&self) -> f64 {
        match self.kind {
            ScenarioKind::Hover { .. } => 0.0,
            ScenarioKind::Waypoint { max_speed, .. } => max_speed,
            ScenarioKind::Circle { speed, .. } => speed,
            ScenarioKind::Star { speed, .. } => speed,
        }
    }

    pub fn issues(&self) -> Vec<ConfigIssue> {
        let mut issues = Vec::new();
        let mut bad = |key: &str, reason: &str| {
            issues.push(ConfigIssue::Invalid { key: key.into(), reason: reason.into() })
        };
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            bad("duration", "must be positive");
        }
        match &self.kind {
            ScenarioKind::Hover { .. } => {}
            ScenarioKind::Waypoint { waypoints, max_speed, max_accel, dwell } => {
                if waypoints.is_empty() {
                    bad("waypoints", "at least one waypoint required");
                }
                if !(*max_speed > 0.0) {
                    bad("max_speed", "must be positive");
                }
                if !(*max_accel > 0.0) {
                    bad("max_accel", "must be positive");
                }
                if !(*dwell >= 0.0) {
                    bad("dwell", "must be non-negative");
                }
            }
            ScenarioKind::Circle { radius, speed, .. } => {
                if !(*radius > 0.0) {
                    bad("radius", "must be positive");
                }
                if !(*speed > 0.0) {
                    bad("speed", "must be positive");
                }
            }
            ScenarioKind::Star { vertices, circumradius, speed, max_accel, dwell, .. } => {
                if *vertices < 5 || vertices % 2 == 0 {
                    bad("vertices", "need an odd count of at least 5");
                }
                if !(*circumradius > 0.0) {
                    bad("circumradius", "must be positive");
                }
                if !(*speed > 0.0) {
                    bad("speed", "must be positive");
                }
                if !(*max_accel > 0.0) {
                    bad("max_accel", "must be positive");
                }
                if !(*dwell >= 0.0) {
                    bad("dwell", "must be non-negative");
                }
            }
        }
        issues
    }
}

/// Distance and speed along a rest-to-rest trapezoidal profile at time `t`.
/// Returns (distance, speed, total time).
fn trapezoid(length: f64, vmax: f64, amax: f64, t: f64) -> (f64, f64, f64) {
    let t_acc_full = vmax / amax;
    let (t_acc, v_peak, t_cruise) = if amax * t_acc_full * t_acc_full >= length {
        // Triangular profile: never reaches vmax.
        let ta = (length / amax).sqrt();
        (ta, amax * ta, 0.0)
    } else {
        (t_acc_full, vmax, (length - amax * t_acc_full * t_acc_full) / vmax)
    };
    let total = 2.0 * t_acc + t_cruise;
    let t = t.clamp(0.0, total);
    let d_acc = 0.5 * amax * t_acc * t_acc;
    if t < t_acc {
        (0.5 * amax * t * t, amax * t, total)
    } else if t < t_acc + t_cruise {
        (d_acc + v_peak * (t - t_acc), v_peak, total)
    } else {
        let tr = total - t;
        (length - 0.5 * amax * tr * tr, amax * tr, total)
    }
}

/// Position and velocity along a polyline flown leg by leg, resting `dwell`
/// before each leg.
fn polyline(points: &[Vector3<f64>], vmax: f64, amax: f64, dwell: f64, t: f64) -> (Vector3<f64>, Vector3<f64>) {
    let mut t = t;
    for pair in points.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if t < dwell {
            return (a, Vector3::zeros());
        }
        t -= dwell;
        let delta = b - a;
        let length = delta.norm();
        if length == 0.0 {
            continue;
        }
        let (_, _, total) = trapezoid(length, vmax, amax, 0.0);
        if t < total {
            let (s, v, _) = trapezoid(length, vmax, amax, t);
            let dir = delta / length;
            return (a + dir * s, dir * v);
        }
        t -= total;
    }
    (*points.last().expect("nonempty polyline"), Vector3::zeros())
}

fn star_vertices(center: &Vector3<f64>, count: usize, radius: f64) -> Vec<Vector3<f64>> {
    let vertex = |k: usize| {
        let angle = PI / 2.0 + 2.0 * PI * k as f64 / count as f64;
        center + Vector3::new(radius * angle.cos(), radius * angle.sin(), 0.0)
    };
    (0..=count).map(|k| vertex((2 * k) % count)).collect()
}

/// Reference setpoint at time `t` in `[0, duration]`.
pub fn reference(t: f64, scenario: &Scenario) -> Result<Setpoint> {
    if !(0.0..=scenario.duration).contains(&t) {
        return Err(Error::Domain(format!("time {t} s outside [0, {}]", scenario.duration)));
    }
    let (position, velocity) = match &scenario.kind {
        ScenarioKind::Hover { position } => (*position, Vector3::zeros()),
        ScenarioKind::Waypoint { waypoints, max_speed, max_accel, dwell } => {
            polyline(waypoints, *max_speed, *max_accel, *dwell, t)
        }
        ScenarioKind::Circle { center, radius, speed } => {
            let rate = speed / radius;
            let phase = rate * t;
            (
                center + Vector3::new(radius * phase.cos(), radius * phase.sin(), 0.0),
                Vector3::new(-speed * phase.sin(), speed * phase.cos(), 0.0),
            )
        }
        ScenarioKind::Star { center, vertices, circumradius, speed, max_accel, dwell } => {
            polyline(&star_vertices(center, *vertices, *circumradius), *speed, *max_accel, *dwell, t)
        }
    };
    let heading = match (&scenario.yaw, &scenario.kind) {
        (YawProfile::Constant(psi), _) => *psi,
        (YawProfile::FollowVelocity, ScenarioKind::Circle { speed, radius, .. }) => speed / radius * t + PI / 2.0,
        (YawProfile::FollowVelocity, _) => {
            if velocity.norm() > 1e-9 {
                velocity.y.atan2(velocity.x)
            } else {
                0.0
            }
        }
    };
    Ok(Setpoint::new(position, velocity, heading))
}
