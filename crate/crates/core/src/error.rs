use thiserror::Error;

/// Errors raised by the mechanism models, solvers and the CLI layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what}: value {value} outside domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    /// The inclusion probability is zero, so the bidder takes no part in the current batch.
    #[error("bidder excluded from current batch (inclusion probability {0})")]
    Excluded(f64),

    #[error("cost function incompatible with interior equilibrium: {0}")]
    IncompatibleCost(String),

    #[error("invalid cost model: {0}")]
    InvalidCost(String),

    #[error("invalid inclusion curve: {0}")]
    InvalidCurve(String),

    #[error("boost params: {0}")]
    BoostParams(&'static str),

    #[error("opponent strategy is not strictly increasing: {0}")]
    NonMonotoneStrategy(String),

    #[error("degenerate participation: threshold {0} exceeds 1")]
    DegenerateParticipation(f64),

    #[error("config: {key}: {constraint}")]
    Config { key: String, constraint: String },

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn config(key: impl Into<String>, constraint: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            constraint: constraint.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

/// Checks `lo <= value <= hi`, rejecting NaN.
pub(crate) fn check_unit(what: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::Domain {
            what,
            value,
            domain: "[0, 1]",
        })
    }
}
