use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// One problem found while validating a configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigIssue {
    Missing(String),
    Invalid { key: String, reason: String },
    Unknown(String),
}

impl std::fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigIssue::Missing(key) => write!(f, "missing key `{key}`"),
            ConfigIssue::Invalid { key, reason } => write!(f, "invalid `{key}`: {reason}"),
            ConfigIssue::Unknown(key) => write!(f, "unknown key `{key}`"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate thrust: commanded force magnitude {magnitude:.3e} N is below the floor {floor:.3e} N")]
    DegenerateThrust { magnitude: f64, floor: f64 },

    #[error("infeasible roll torque: |m_x| = {m_x:.4} N·m exceeds 2·f_a·l = {limit:.4} N·m")]
    InfeasibleRoll { m_x: f64, limit: f64 },

    #[error("simulation diverged at t = {time:.4} s")]
    SimulationDiverged { time: f64 },

    #[error("insufficient excitation to identify {}", .0.join(", "))]
    InsufficientExcitation(Vec<&'static str>),

    #[error("metrics window: log spans {span:.3} s but the transient window is {window:.3} s")]
    MetricsWindow { span: f64, window: f64 },

    #[error("invalid configuration: {}", .0.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("; "))]
    Config(Vec<ConfigIssue>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable category, used by the command-line tool.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::DegenerateThrust { .. } => "degenerate-thrust",
            Error::InfeasibleRoll { .. } => "infeasible-roll",
            Error::SimulationDiverged { .. } => "simulation-diverged",
            Error::InsufficientExcitation(_) => "insufficient-excitation",
            Error::MetricsWindow { .. } => "metrics-window",
            Error::Config(_) => "config",
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => "io",
        }
    }
}
