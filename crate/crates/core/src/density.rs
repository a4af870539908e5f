//! Exact finite-time law of the damped process.
//!
//! For `t > 0`, `D(t)` has an atom `alpha e^{-lambda1 t}` at `c1 t` (no
//! switch, started rightward), an atom `(1 - alpha) e^{-lambda2 t}` at
//! `-c2 t` (no switch, started leftward), and a density on the open interval
//! `(-c2 t, c1 t)`. Writing `tau = (c2 t + x) / (c1 + c2)` for the time spent
//! moving right and `s = t - tau`,
//!
//! ```text
//!            e^{-l1 tau} e^{-l2 s} [l1 + l2 - alpha l2 e^{-l1 tau} - (1 - alpha) l1 e^{-l2 s}]
//! p(x, t) = -----------------------------------------------------------------------------
//!                      (c1 + c2) [e^{-l2 s} + e^{-l1 tau} (1 - e^{-l2 s})]^2
//! ```
//!
//! Everything is evaluated in log space so that large `t` does not underflow.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::quadrature::{integrate, QuadratureOptions};

/// Which endpoint atoms an interval probability may pick up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomInclusion {
    /// Atom at `-c2 t`.
    pub lower: bool,
    /// Atom at `c1 t`.
    pub upper: bool,
}

impl AtomInclusion {
    pub const BOTH: AtomInclusion = AtomInclusion {
        lower: true,
        upper: true,
    };
    pub const NONE: AtomInclusion = AtomInclusion {
        lower: false,
        upper: false,
    };
}

/// The law of `D(t)` at a fixed time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LawOfD {
    pub t: f64,
    pub params: ModelParams,
    /// Probability at `c1 t`.
    pub mass_up: f64,
    /// Probability at `-c2 t`.
    pub mass_down: f64,
}

impl LawOfD {
    pub fn new(params: &ModelParams, t: f64) -> Result<Self> {
        let (mass_up, mass_down) = point_masses(t, params)?;
        Ok(LawOfD {
            t,
            params: *params,
            mass_up,
            mass_down,
        })
    }

    pub fn support(&self) -> (f64, f64) {
        (-self.params.c2() * self.t, self.params.c1() * self.t)
    }

    pub fn density(&self, x: f64) -> f64 {
        log_density_unchecked(x, self.t, &self.params).exp()
    }

    /// `P(D(t) <= x)`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        let (lo, _) = self.support();
        if x < lo {
            return Ok(0.0);
        }
        interval_probability(lo, x, self.t, &self.params, AtomInclusion::BOTH)
    }

    /// `E[D(t)]` by quadrature; used as an oracle for the samplers.
    pub fn mean(&self) -> Result<f64> {
        let (lo, hi) = self.support();
        let points = breakpoints(lo, hi, self.t, &self.params);
        let r = integrate(|x| x * self.density(x), &points, &QuadratureOptions {
            abs_tol: 1e-14 * (hi - lo),
            ..Default::default()
        })?;
        Ok(r.value + self.mass_up * hi + self.mass_down * lo)
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveTime(t))
    }
}

/// Time spent moving right by a path that ends at `x` at time `t`.
pub fn tau_star(x: f64, t: f64, params: &ModelParams) -> f64 {
    (params.c2() * t + x) / (params.c1() + params.c2())
}

fn log_sum_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Log of the density formula, extended continuously to the closed interval
/// `[-c2 t, c1 t]`. Callers are responsible for `t > 0`.
fn log_density_formula(x: f64, t: f64, params: &ModelParams) -> f64 {
    let (l1, l2, alpha) = (params.lambda1(), params.lambda2(), params.alpha());
    let tau = tau_star(x, t, params).clamp(0.0, t);
    let s = (t - tau).max(0.0);
    let log_a = -l1 * tau;
    let log_b = -l2 * s;
    let bracket = l1 + l2 - alpha * l2 * log_a.exp() - (1.0 - alpha) * l1 * log_b.exp();
    let log_inner = log_sum_exp(log_b, log_a + (-log_b.exp_m1()).ln());
    log_a + log_b + bracket.ln() - (params.c1() + params.c2()).ln() - 2.0 * log_inner
}

fn log_density_unchecked(x: f64, t: f64, params: &ModelParams) -> f64 {
    if x > -params.c2() * t && x < params.c1() * t {
        log_density_formula(x, t, params)
    } else {
        f64::NEG_INFINITY
    }
}

/// `ln p(x, t)`; `-inf` outside the open support.
pub fn log_density(x: f64, t: f64, params: &ModelParams) -> Result<f64> {
    check_time(t)?;
    Ok(log_density_unchecked(x, t, params))
}

/// Absolutely continuous part `p(x, t)`. Zero outside `(-c2 t, c1 t)`,
/// including the endpoints, where the atoms live.
pub fn density_p(x: f64, t: f64, params: &ModelParams) -> Result<f64> {
    Ok(log_density(x, t, params)?.exp())
}

/// `(mass at c1 t, mass at -c2 t)`.
pub fn point_masses(t: f64, params: &ModelParams) -> Result<(f64, f64)> {
    check_time(t)?;
    Ok((
        params.alpha() * (-params.lambda1() * t).exp(),
        (1.0 - params.alpha()) * (-params.lambda2() * t).exp(),
    ))
}

fn log_point_masses(t: f64, params: &ModelParams) -> (f64, f64) {
    (
        params.alpha().ln() - params.lambda1() * t,
        (1.0 - params.alpha()).ln() - params.lambda2() * t,
    )
}

/// Breakpoints for integrating `p(., t)` over `[lo, hi]`.
///
/// The density concentrates around `x0 t` with a width that does not grow
/// with `t`, and varies fastest next to the support endpoints. Panels are
/// cut geometrically around all three, with the typical segment length
/// `(c1 + c2) / (lambda1 + lambda2)` as the finest scale.
fn breakpoints(lo: f64, hi: f64, t: f64, params: &ModelParams) -> Vec<f64> {
    let scale = (params.c1() + params.c2()) / (params.lambda1() + params.lambda2());
    let centers = [params.x0() * t, -params.c2() * t, params.c1() * t];
    let mut points = vec![lo, hi];
    for c in centers {
        if c > lo && c < hi {
            points.push(c);
        }
        let mut h = scale / 8.0;
        while h < 2.0 * (hi - lo) {
            for x in [c - h, c + h] {
                if x > lo && x < hi {
                    points.push(x);
                }
            }
            h *= 2.0;
        }
    }
    points.sort_by(f64::total_cmp);
    points.dedup();
    points
}

/// `ln` of the continuous mass on `[a, b]`; `-inf` when the overlap with
/// the support is empty.
fn log_continuous_mass(a: f64, b: f64, t: f64, params: &ModelParams) -> Result<f64> {
    let lo = a.max(-params.c2() * t);
    let hi = b.min(params.c1() * t);
    if !(hi > lo) {
        return Ok(f64::NEG_INFINITY);
    }
    let points = breakpoints(lo, hi, t, params);
    // log p is unimodal with its peak at x0 t, so the maximum over [lo, hi]
    // sits at one of these points; factor it out before exponentiating.
    let peak = (params.x0() * t).clamp(lo, hi);
    let shift = [lo, hi, peak]
        .iter()
        .chain(points.iter())
        .map(|&x| log_density_formula(x, t, params))
        .fold(f64::NEG_INFINITY, f64::max);
    let r = integrate(
        |x| (log_density_unchecked(x, t, params) - shift).exp(),
        &points,
        &QuadratureOptions::default(),
    )?;
    Ok(shift + r.value.ln())
}

fn check_interval(a: f64, b: f64, t: f64) -> Result<()> {
    check_time(t)?;
    if a.is_nan() || b.is_nan() || a > b {
        return Err(Error::InvalidInterval { a, b });
    }
    Ok(())
}

/// `ln P(D(t) in [a, b])`, where the endpoint atoms count only when their
/// flag is set. Accurate far into the tails.
pub fn log_interval_probability(
    a: f64,
    b: f64,
    t: f64,
    params: &ModelParams,
    atoms: AtomInclusion,
) -> Result<f64> {
    check_interval(a, b, t)?;
    let (log_up, log_down) = log_point_masses(t, params);
    let (lower, upper) = (-params.c2() * t, params.c1() * t);
    let mut total = log_continuous_mass(a, b, t, params)?;
    if atoms.upper && a <= upper && upper <= b {
        total = log_sum_exp(total, log_up);
    }
    if atoms.lower && a <= lower && lower <= b {
        total = log_sum_exp(total, log_down);
    }
    Ok(total)
}

pub fn interval_probability(
    a: f64,
    b: f64,
    t: f64,
    params: &ModelParams,
    atoms: AtomInclusion,
) -> Result<f64> {
    Ok(log_interval_probability(a, b, t, params, atoms)?.exp())
}
