//! Side-by-side report on the damped and the standard process: rate
//! functions, decay rates, law-of-large-numbers probes and level crossings.

use rayon::prelude::*;
use serde::Serialize;

use super::crossing::{estimate_crossing, CrossingEstimate, HorizonPolicy};
use super::fit::{fit_decay_slope, sharp_bound_check, SharpBoundCheck, SlopeFit};
use crate::density::LawOfD;
use crate::error::{Error, Result};
use crate::params::{ModelParams, RawParams, Regime};
use crate::rates::{decay_rate_closed, decay_rate_numeric, rate_id, rate_is, ExtendedRate};
use crate::rng::RngStream;
use crate::sampler::{sample_position, ProcessKind};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareConfig {
    /// Number of points on the rate-function grid over `[-c2, c1]`.
    pub grid_size: usize,
    /// Paths per process for the law-of-large-numbers probes.
    pub lln_paths: u64,
    pub lln_time: f64,
    /// Paths per process for the crossing estimates.
    pub crossing_paths: u64,
    pub q_grid: Vec<f64>,
    pub seed: u64,
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig {
            grid_size: 301,
            lln_paths: 10_000,
            lln_time: 100.0,
            crossing_paths: 100_000,
            q_grid: (2..=8).map(f64::from).collect(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateRow {
    pub x: f64,
    pub i_d: ExtendedRate,
    pub i_s: ExtendedRate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl NamedCheck {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        NamedCheck {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayComparison {
    pub w_damped: f64,
    pub w_standard: f64,
    pub w_damped_numeric: f64,
    pub w_standard_numeric: f64,
    /// `w_standard < w_damped`.
    pub strictly_ordered: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LlnProbe {
    pub process_kind: ProcessKind,
    pub t: f64,
    pub n_paths: u64,
    /// Sample mean of `X(t) / t`.
    pub mean: f64,
    pub std_err: f64,
    /// The limit `x0`.
    pub target: f64,
    pub within_3se: bool,
    /// `E[X(t)] / t` at this finite `t`, which differs from `x0` unless
    /// the initial velocity is already at equilibrium.
    pub exact_finite_t_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum CrossingSection {
    Skipped {
        reason: String,
    },
    Ran {
        damped_policy: HorizonPolicy,
        standard_policy: HorizonPolicy,
        /// `exp(-w * margin)` for each process.
        damped_residual_bias: f64,
        standard_residual_bias: f64,
        damped: Vec<CrossingEstimate>,
        standard: Vec<CrossingEstimate>,
        damped_fit: Option<SlopeFit>,
        damped_fit_error: Option<String>,
        standard_fit: Option<SlopeFit>,
        standard_fit_error: Option<String>,
        sharp_bound: Option<SharpBoundCheck>,
        sharp_bound_error: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub params: RawParams,
    pub regime: Regime,
    pub config: CompareConfig,
    pub rates: Vec<RateRow>,
    pub checks: Vec<NamedCheck>,
    pub decay: Option<DecayComparison>,
    pub lln: Vec<LlnProbe>,
    pub crossing: CrossingSection,
}

impl CompareReport {
    pub fn checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// `E[S(t)] / t` for the standard process. The mean velocity relaxes to
/// `x0` at rate `lambda1 + lambda2`.
pub fn standard_mean_over_t(params: &ModelParams, t: f64) -> f64 {
    let total = params.lambda1() + params.lambda2();
    let v0 = params.alpha() * params.c1() - (1.0 - params.alpha()) * params.c2();
    let x0 = params.x0();
    x0 + (v0 - x0) * (-(total * t)).exp_m1() / -(total * t)
}

fn sub_seed(seed: u64, tag: u64) -> u64 {
    seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn rate_grid(params: &ModelParams, n: usize) -> Vec<RateRow> {
    let (lo, hi) = (-params.c2(), params.c1());
    (0..n)
        .map(|i| {
            let x = if i + 1 == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            };
            RateRow {
                x,
                i_d: rate_id(x, params),
                i_s: rate_is(x, params),
            }
        })
        .collect()
}

fn bullet_checks(params: &ModelParams, rows: &[RateRow]) -> Vec<NamedCheck> {
    let (c1, c2) = (params.c1(), params.c2());
    let x0 = params.x0();
    let near_x0 = |x: f64| (x - x0).abs() <= 1e-9 * (c1 + c2);
    let f = |r: ExtendedRate| r.as_f64();

    let zero_at_x0 = f(rate_id(x0, params)) <= 1e-12 && f(rate_is(x0, params)) <= 1e-12;
    let positive_elsewhere = rows
        .iter()
        .filter(|r| !near_x0(r.x))
        .all(|r| f(r.i_d) > 0.0 && f(r.i_s) > 0.0);
    let unique_zero = NamedCheck::new(
        "unique_zero",
        zero_at_x0 && positive_elsewhere,
        format!(
            "I_D(x0) = {}, I_S(x0) = {} at x0 = {x0}; positive at every other grid point: {positive_elsewhere}",
            f(rate_id(x0, params)),
            f(rate_is(x0, params))
        ),
    );

    let outside: Vec<f64> = [1e-9, 1e-3, 1.0, 1e3]
        .iter()
        .flat_map(|d| [-c2 - d * (c1 + c2), c1 + d * (c1 + c2)])
        .collect();
    let infinite_outside = NamedCheck::new(
        "infinite_off_support",
        outside
            .iter()
            .all(|&x| rate_id(x, params).is_infinite() && rate_is(x, params).is_infinite()),
        format!("checked {} points outside [{}, {}]", outside.len(), -c2, c1),
    );

    let ends = [
        (rate_id(-c2, params), params.lambda2()),
        (rate_is(-c2, params), params.lambda2()),
        (rate_id(c1, params), params.lambda1()),
        (rate_is(c1, params), params.lambda1()),
    ];
    let endpoint_values = NamedCheck::new(
        "endpoint_values",
        ends.iter().all(|(r, want)| (f(*r) - want).abs() <= 1e-12 * want.max(1.0)),
        format!(
            "I_D(-c2) = {}, I_S(-c2) = {}, I_D(c1) = {}, I_S(c1) = {}",
            ends[0].0, ends[1].0, ends[2].0, ends[3].0
        ),
    );

    let interior: Vec<&RateRow> = rows
        .iter()
        .filter(|r| r.x > -c2 && r.x < c1 && !near_x0(r.x))
        .collect();
    let violations = interior.iter().filter(|r| r.i_d <= r.i_s).count();
    let dominance = NamedCheck::new(
        "damped_dominates",
        violations == 0,
        format!("I_D > I_S at {} of {} interior grid points", interior.len() - violations, interior.len()),
    );

    vec![unique_zero, infinite_outside, endpoint_values, dominance]
}

fn lln_probe(kind: ProcessKind, params: &ModelParams, config: &CompareConfig, seed: u64) -> Result<LlnProbe> {
    let t = config.lln_time;
    let n = config.lln_paths;
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two paths for a mean and its error".into()));
    }
    let xs: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| sample_position(kind, params, t, RngStream::new(seed, i)).map(|x| x / t))
        .collect::<Result<_>>()?;
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let std_err = (var / n as f64).sqrt();
    let target = params.x0();
    let exact_finite_t_mean = match kind {
        ProcessKind::Damped => LawOfD::new(params, t)?.mean()? / t,
        ProcessKind::Standard => standard_mean_over_t(params, t),
    };
    Ok(LlnProbe {
        process_kind: kind,
        t,
        n_paths: n,
        mean,
        std_err,
        target,
        within_3se: (mean - target).abs() <= 3.0 * std_err,
        exact_finite_t_mean,
    })
}

fn split<T>(r: Result<T>) -> (Option<T>, Option<String>) {
    match r {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(e.to_string())),
    }
}

fn crossing_section(params: &ModelParams, config: &CompareConfig) -> Result<CrossingSection> {
    let regime = params.regime();
    if !regime.stable {
        return Ok(CrossingSection::Skipped {
            reason: format!("unstable regime (drift {} >= 0): crossing probabilities do not decay", regime.drift),
        });
    }
    let w_d = decay_rate_closed(ProcessKind::Damped, params)?;
    let w_s = decay_rate_closed(ProcessKind::Standard, params)?;
    let damped_policy = HorizonPolicy::for_decay_rate(w_d);
    let standard_policy = HorizonPolicy::for_decay_rate(w_s);
    let damped = estimate_crossing(
        &config.q_grid,
        params,
        ProcessKind::Damped,
        config.crossing_paths,
        sub_seed(config.seed, 3),
        damped_policy,
    )?;
    let standard = estimate_crossing(
        &config.q_grid,
        params,
        ProcessKind::Standard,
        config.crossing_paths,
        sub_seed(config.seed, 4),
        standard_policy,
    )?;
    let (damped_fit, damped_fit_error) = split(fit_decay_slope(&damped));
    let (standard_fit, standard_fit_error) = split(fit_decay_slope(&standard));
    let (sharp_bound, sharp_bound_error) = split(sharp_bound_check(&standard, w_s));
    Ok(CrossingSection::Ran {
        damped_policy,
        standard_policy,
        damped_residual_bias: damped_policy.residual_bias(w_d),
        standard_residual_bias: standard_policy.residual_bias(w_s),
        damped,
        standard,
        damped_fit,
        damped_fit_error,
        standard_fit,
        standard_fit_error,
        sharp_bound,
        sharp_bound_error,
    })
}

pub fn compare_report(params: &ModelParams, config: &CompareConfig) -> Result<CompareReport> {
    if config.grid_size < 2 {
        return Err(Error::InvalidArgument("rate grid needs at least two points".into()));
    }
    if !(config.lln_time.is_finite() && config.lln_time > 0.0) {
        return Err(Error::NonPositiveTime(config.lln_time));
    }
    let rates = rate_grid(params, config.grid_size);
    let checks = bullet_checks(params, &rates);
    let regime = params.regime();

    let decay = if regime.stable {
        let w_damped = decay_rate_closed(ProcessKind::Damped, params)?;
        let w_standard = decay_rate_closed(ProcessKind::Standard, params)?;
        Some(DecayComparison {
            w_damped,
            w_standard,
            w_damped_numeric: decay_rate_numeric(ProcessKind::Damped, params)?.w_numeric,
            w_standard_numeric: decay_rate_numeric(ProcessKind::Standard, params)?.w_numeric,
            strictly_ordered: w_standard < w_damped,
        })
    } else {
        None
    };

    let lln = vec![
        lln_probe(ProcessKind::Damped, params, config, sub_seed(config.seed, 1))?,
        lln_probe(ProcessKind::Standard, params, config, sub_seed(config.seed, 2))?,
    ];

    Ok(CompareReport {
        params: params.raw(),
        regime,
        config: config.clone(),
        rates,
        checks,
        decay,
        lln,
        crossing: crossing_section(params, config)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> CompareConfig {
        CompareConfig {
            grid_size: 101,
            lln_paths: 2_000,
            lln_time: 20.0,
            crossing_paths: 20_000,
            q_grid: vec![0.5, 1.0, 1.5, 2.0, 3.0],
            seed: 5,
        }
    }

    #[test]
    fn baseline_report() {
        let r = compare_report(&ModelParams::baseline(), &small()).unwrap();
        assert!(r.checks_pass(), "{:?}", r.checks);
        assert_eq!(r.checks.len(), 4);
        let d = r.decay.unwrap();
        assert_eq!((d.w_damped, d.w_standard), (1.0, 0.5));
        assert!(d.strictly_ordered);
        assert_eq!(r.rates.last().unwrap().x, 1.0);
        assert_eq!(r.rates.last().unwrap().i_d.as_f64(), 1.0);
        assert!(matches!(r.crossing, CrossingSection::Ran { .. }));
        for probe in &r.lln {
            assert!((probe.exact_finite_t_mean + 0.5).abs() < 1e-9, "{probe:?}");
        }
    }

    #[test]
    fn unstable_skips_crossings_only() {
        let p = ModelParams::new(1.0, 2.0, 2.0, 1.0, 0.5).unwrap();
        let r = compare_report(&p, &small()).unwrap();
        assert!(matches!(r.crossing, CrossingSection::Skipped { .. }));
        assert!(r.decay.is_none());
        assert_eq!(r.rates.len(), 101);
        assert!(r.checks_pass(), "{:?}", r.checks);
    }

    #[test]
    fn symmetric_model_has_symmetric_rate() {
        let p = ModelParams::new(1.5, 1.5, 2.0, 2.0, 0.5).unwrap();
        assert_eq!(p.x0(), 0.0);
        for row in rate_grid(&p, 201) {
            let mirror = rate_id(-row.x, &p).as_f64();
            assert!((row.i_d.as_f64() - mirror).abs() <= 1e-12, "x = {}", row.x);
        }
    }

    #[test]
    fn standard_mean_matches_euler_ode() {
        // d/ds m(s) = lambda2 (1 - m) - lambda1 m for m = P(V(s) = c1)
        let p = ModelParams::new(0.7, 1.9, 1.3, 0.4, 0.8).unwrap();
        let (t, h) = (3.0, 1e-4);
        let (mut m, mut integral) = (p.alpha(), 0.0);
        let steps = (t / h) as usize;
        let v = |m: f64| m * p.c1() - (1.0 - m) * p.c2();
        for _ in 0..steps {
            let dm = |m: f64| p.lambda2() * (1.0 - m) - p.lambda1() * m;
            let next = m + h * dm(m);
            integral += 0.5 * h * (v(m) + v(next));
            m = next;
        }
        assert!((integral / t - standard_mean_over_t(&p, t)).abs() < 1e-4);
    }
}
