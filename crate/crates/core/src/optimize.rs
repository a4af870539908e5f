//! One-dimensional minimization on a bracket.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
}

/// Golden-section search on `[a, b]`. The bracket endpoints are candidates
/// too, so monotone objectives return the boundary.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, x_tol: f64, max_iter: usize) -> Minimum {
    let (fa0, fb0) = ((a, f(a)), (b, f(b)));
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..max_iter {
        if (b - a).abs() <= x_tol {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    [(x1, f1), (x2, f2), fa0, fb0]
        .into_iter()
        .fold(Minimum { x: f64::NAN, value: f64::INFINITY }, |best, (x, v)| {
            if v < best.value {
                Minimum { x, value: v }
            } else {
                best
            }
        })
}

/// Samples `f` on `n + 1` evenly spaced points of `[a, b]` and checks that
/// the values fall and then rise, up to relative slack `tol`. Returns the
/// index of the smallest sample.
pub fn coarse_unimodal_scan<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, n: usize, tol: f64) -> Result<(Vec<f64>, usize)> {
    let xs: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let best = ys
        .iter()
        .enumerate()
        .min_by(|l, r| l.1.total_cmp(r.1))
        .map(|(i, _)| i)
        .ok_or_else(|| Error::OptimizationFailure("empty scan".into()))?;
    let slack = |y: f64| tol * y.abs().max(1.0);
    let falls = ys[..=best].windows(2).all(|w| w[1] <= w[0] + slack(w[0]));
    let rises = ys[best..].windows(2).all(|w| w[1] + slack(w[1]) >= w[0]);
    if !(falls && rises) || ys.iter().any(|y| y.is_nan()) {
        return Err(Error::OptimizationFailure(format!(
            "objective is not unimodal on [{a}, {b}]"
        )));
    }
    Ok((xs, best))
}
