//! Model parameters and regime classification.
//!
//! A model is the five-tuple `(lambda1, lambda2, c1, c2, alpha)`: switching
//! rates out of the rightward and leftward states, the two speeds, and the
//! probability that the motion starts rightward.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unvalidated parameters, as read from a JSON file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawParams {
    pub lambda1: f64,
    pub lambda2: f64,
    pub c1: f64,
    pub c2: f64,
    pub alpha: f64,
}

/// Validated model parameters. Construct through [`ModelParams::new`] or
/// [`validate_params`]; deserialization validates as well.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ModelParams {
    lambda1: f64,
    lambda2: f64,
    c1: f64,
    c2: f64,
    alpha: f64,
}

/// Drift of the law of large numbers and the stability flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    /// `(lambda2 c1 - lambda1 c2) / (lambda1 + lambda2)`, the common zero of both rate functions.
    pub drift: f64,
    /// `lambda2 c1 - lambda1 c2 < 0`.
    pub stable: bool,
}

pub fn validate_params(raw: RawParams) -> Result<ModelParams> {
    let positive = [
        ("lambda1", raw.lambda1),
        ("lambda2", raw.lambda2),
        ("c1", raw.c1),
        ("c2", raw.c2),
    ];
    for (name, value) in positive {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::NonPositiveParameter { name, value });
        }
    }
    if !(0.0..=1.0).contains(&raw.alpha) {
        return Err(Error::AlphaOutOfRange(raw.alpha));
    }
    Ok(ModelParams {
        lambda1: raw.lambda1,
        lambda2: raw.lambda2,
        c1: raw.c1,
        c2: raw.c2,
        alpha: raw.alpha,
    })
}

pub fn classify_regime(params: &ModelParams) -> Regime {
    let numerator = params.lambda2 * params.c1 - params.lambda1 * params.c2;
    Regime {
        drift: numerator / (params.lambda1 + params.lambda2),
        stable: numerator < 0.0,
    }
}

impl ModelParams {
    pub fn new(lambda1: f64, lambda2: f64, c1: f64, c2: f64, alpha: f64) -> Result<Self> {
        validate_params(RawParams {
            lambda1,
            lambda2,
            c1,
            c2,
            alpha,
        })
    }

    /// Reference parameter set: `c1 = 1, c2 = 2,
    /// lambda1 = lambda2 = 1`, started from the symmetric initial law.
    pub fn baseline() -> Self {
        ModelParams {
            lambda1: 1.0,
            lambda2: 1.0,
            c1: 1.0,
            c2: 2.0,
            alpha: 0.5,
        }
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.lambda1, self.lambda2, self.c1, self.c2, alpha)
    }

    pub fn regime(&self) -> Regime {
        classify_regime(self)
    }

    /// Zero of the rate functions; same as `regime().drift`.
    pub fn x0(&self) -> f64 {
        self.regime().drift
    }

    pub fn raw(&self) -> RawParams {
        RawParams::from(*self)
    }
}

impl TryFrom<RawParams> for ModelParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        validate_params(raw)
    }
}

impl From<ModelParams> for RawParams {
    fn from(p: ModelParams) -> Self {
        RawParams {
            lambda1: p.lambda1,
            lambda2: p.lambda2,
            c1: p.c1,
            c2: p.c2,
            alpha: p.alpha,
        }
    }
}
