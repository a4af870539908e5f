//! Least-squares decay slopes for crossing estimates and a check of the
//! sharp exponential bound for the standard process.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::crossing::CrossingEstimate;
use crate::error::{Error, Result};

/// Levels with fewer hits than this are left out of the slope fit.
pub const MIN_HITS_FOR_FIT: u64 = 30;

const MIN_FIT_LEVELS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeFit {
    pub q_values: Vec<f64>,
    pub log_p: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    /// 95% confidence interval for the slope.
    pub slope_ci: (f64, f64),
    pub excluded_levels: Vec<f64>,
}

impl SlopeFit {
    pub fn residuals(&self) -> Vec<f64> {
        self.q_values
            .iter()
            .zip(&self.log_p)
            .map(|(q, y)| y - (self.intercept + self.slope * q))
            .collect()
    }
}

pub fn fit_decay_slope(estimates: &[CrossingEstimate]) -> Result<SlopeFit> {
    fit_decay_slope_with(estimates, MIN_HITS_FOR_FIT)
}

/// OLS of `ln p_hat` on `q` over the levels with at least `min_hits` hits.
pub fn fit_decay_slope_with(estimates: &[CrossingEstimate], min_hits: u64) -> Result<SlopeFit> {
    let min_hits = min_hits.max(1);
    let (kept, excluded): (Vec<&CrossingEstimate>, Vec<&CrossingEstimate>) = estimates.iter().partition(|e| e.hits >= min_hits);
    if kept.len() < MIN_FIT_LEVELS {
        return Err(Error::InsufficientLevels {
            usable: kept.len(),
            required: MIN_FIT_LEVELS,
        });
    }
    let q_values: Vec<f64> = kept.iter().map(|e| e.q).collect();
    let log_p: Vec<f64> = kept.iter().map(|e| e.p_hat.ln()).collect();

    let n = q_values.len() as f64;
    let q_mean = q_values.iter().sum::<f64>() / n;
    let y_mean = log_p.iter().sum::<f64>() / n;
    let sxx: f64 = q_values.iter().map(|q| (q - q_mean).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InvalidArgument("levels used in the fit must not all coincide".into()));
    }
    let sxy: f64 = q_values.iter().zip(&log_p).map(|(q, y)| (q - q_mean) * (y - y_mean)).sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * q_mean;

    let rss: f64 = q_values
        .iter()
        .zip(&log_p)
        .map(|(q, y)| (y - intercept - slope * q).powi(2))
        .sum();
    let df = n - 2.0;
    let se = (rss / df / sxx).sqrt();
    let t_crit = StudentsT::new(0.0, 1.0, df)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?
        .inverse_cdf(0.975);

    Ok(SlopeFit {
        q_values,
        log_p,
        slope,
        intercept,
        slope_ci: (slope - t_crit * se, slope + t_crit * se),
        excluded_levels: excluded.iter().map(|e| e.q).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpBoundCheck {
    /// `p_hat(q) * exp(q * w)` for each level with at least one hit.
    pub ratios: Vec<f64>,
    /// Largest ratio.
    pub m_hat: f64,
    /// Spearman correlation between `q` and the ratios.
    pub spearman: f64,
    /// One-sided 5% threshold for the correlation.
    pub threshold: f64,
    pub holds: bool,
}

/// Checks that `p_hat(q) <= M exp(-w q)` with a finite `M` and that the
/// ratios `p_hat(q) e^{w q}` show no increasing trend beyond noise.
pub fn sharp_bound_check(estimates: &[CrossingEstimate], w: f64) -> Result<SharpBoundCheck> {
    let used: Vec<&CrossingEstimate> = estimates.iter().filter(|e| e.hits > 0).collect();
    if used.len() < MIN_FIT_LEVELS {
        return Err(Error::InsufficientLevels {
            usable: used.len(),
            required: MIN_FIT_LEVELS,
        });
    }
    let q: Vec<f64> = used.iter().map(|e| e.q).collect();
    let ratios: Vec<f64> = used.iter().map(|e| e.p_hat * (e.q * w).exp()).collect();
    let m_hat = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let spearman = spearman(&q, &ratios);
    let threshold = 1.645 / ((used.len() - 1) as f64).sqrt();
    Ok(SharpBoundCheck {
        holds: m_hat.is_finite() && spearman <= threshold,
        ratios,
        m_hat,
        spearman,
        threshold,
    })
}

/// Average ranks, with values within a relative `1e-9` treated as ties.
fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() {
            let (a, b) = (v[idx[i]], v[idx[j + 1]]);
            if (b - a).abs() <= 1e-9 * a.abs().max(b.abs()) {
                j += 1;
            } else {
                break;
            }
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = r;
        }
        i = j + 1;
    }
    out
}

fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let (rx, ry) = (ranks(x), ranks(y));
    let n = rx.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        0.0
    } else {
        cov / (vx * vy).sqrt()
    }
}
