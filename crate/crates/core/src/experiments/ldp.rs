use serde::Serialize;

use crate::density::{log_interval_probability, AtomInclusion};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::rates::rate_id;

pub const LDP_CSV_HEADER: &str = "t,x,eps,scaled_log_prob,target";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LdpPoint {
    pub t: f64,
    pub x: f64,
    pub eps: f64,
    /// `(1/t) ln P(D(t)/t in (x - eps, x + eps))`.
    pub scaled_log_prob: f64,
    /// `-inf { I_D(y) : y in (x - eps, x + eps) }`.
    pub target: f64,
}

impl LdpPoint {
    pub fn gap(&self) -> f64 {
        (self.scaled_log_prob - self.target).abs()
    }

    pub fn csv_row(&self) -> String {
        format!("{},{},{},{},{}", self.t, self.x, self.eps, self.scaled_log_prob, self.target)
    }
}

/// `-inf` of `I_D` over the open window `(lo, hi)`, which must meet the support.
pub fn window_target(lo: f64, hi: f64, params: &ModelParams) -> f64 {
    let (s_lo, s_hi) = (-params.c2(), params.c1());
    let x0 = params.x0();
    if lo <= x0 && x0 <= hi {
        return 0.0;
    }
    // I_D is affine on either side of x0, so the infimum is at the window
    // edge nearest to x0, clipped to the support.
    let edge = if hi < x0 { hi.min(s_hi) } else { lo.max(s_lo) };
    -rate_id(edge, params).as_f64()
}

pub fn ldp_curve(x: f64, eps: f64, t_grid: &[f64], params: &ModelParams) -> Result<Vec<LdpPoint>> {
    if !(eps > 0.0 && eps.is_finite()) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!("need finite x and eps > 0, got x = {x}, eps = {eps}")));
    }
    if t_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("time grid must be strictly increasing".into()));
    }
    let (lo, hi) = (x - eps, x + eps);
    let (s_lo, s_hi) = (-params.c2(), params.c1());
    if hi <= s_lo || lo >= s_hi {
        return Err(Error::EmptyWindow { lo, hi });
    }
    let target = window_target(lo, hi, params);
    let atoms = AtomInclusion {
        lower: lo < s_lo && s_lo < hi,
        upper: lo < s_hi && s_hi < hi,
    };
    t_grid
        .iter()
        .map(|&t| {
            let log_p = log_interval_probability(lo * t, hi * t, t, params, atoms)?;
            Ok(LdpPoint {
                t,
                x,
                eps,
                scaled_log_prob: log_p / t,
                target,
            })
        })
        .collect()
}
