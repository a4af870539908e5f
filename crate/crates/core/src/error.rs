use thiserror::Error;

use crate::experiments::CrossingEstimate;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter `{name}` must be strictly positive and finite, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },

    #[error("alpha must lie in [0, 1], got {0}")]
    AlphaOutOfRange(f64),

    #[error("horizon must be strictly positive and finite, got {0}")]
    NonPositiveHorizon(f64),

    #[error("time {t} outside the path range [0, {horizon}]")]
    TimeOutOfRange { t: f64, horizon: f64 },

    #[error("path exceeded the safety cap of {cap:e} switches before the horizon")]
    ExplosionGuardTripped { cap: f64 },

    #[error("time must be strictly positive and finite, got {0}")]
    NonPositiveTime(f64),

    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },

    #[error("quadrature did not reach tolerance on [{a}, {b}] (estimate {estimate:e}, error {error:e})")]
    QuadratureFailure {
        a: f64,
        b: f64,
        estimate: f64,
        error: f64,
    },

    #[error("x = {x} lies outside the support [{lo}, {hi}]")]
    OutOfSupport { x: f64, lo: f64, hi: f64 },

    #[error("parameters violate the stability condition (drift {drift} is not negative)")]
    UnstableRegime { drift: f64 },

    #[error("minimization failed: {0}")]
    OptimizationFailure(String),

    #[error("window ({lo}, {hi}) does not meet the support; probability is 0")]
    EmptyWindow { lo: f64, hi: f64 },

    #[error("{truncated} of {n_paths} paths hit the horizon cap before resolving")]
    BudgetExceeded {
        truncated: u64,
        n_paths: u64,
        estimates: Vec<CrossingEstimate>,
    },

    #[error("need at least {required} usable levels, got {usable}")]
    InsufficientLevels { usable: usize, required: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Numerical failures (as opposed to rejected inputs). The CLI maps these to exit status 2.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::QuadratureFailure { .. }
                | Error::OptimizationFailure(_)
                | Error::ExplosionGuardTripped { .. }
                | Error::BudgetExceeded { .. }
        )
    }
}
