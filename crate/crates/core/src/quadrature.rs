//! Globally adaptive Gauss-Kronrod (7/15) quadrature.
//!
//! The interval is first cut at caller-supplied breakpoints; afterwards the
//! panel with the largest error estimate is bisected until the summed error
//! meets the tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of bisections applied to any initial panel.
    pub max_depth: u32,
    pub max_panels: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_depth: 60,
            max_panels: 50_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, depth: u32) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (j, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
        depth,
    }
}

/// Integrates `f` over `[breakpoints[0], breakpoints[last]]`. Breakpoints
/// must be sorted; duplicates are ignored.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    opts: &QuadratureOptions,
) -> Result<QuadratureResult> {
    let (Some(&lo), Some(&hi)) = (breakpoints.first(), breakpoints.last()) else {
        return Err(Error::InvalidArgument("quadrature needs at least one point".into()));
    };
    if breakpoints.iter().any(|x| !x.is_finite()) || breakpoints.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidInterval { a: lo, b: hi });
    }

    let mut heap = BinaryHeap::new();
    for w in breakpoints.windows(2) {
        if w[1] > w[0] {
            heap.push(gauss_kronrod(&f, w[0], w[1], 0));
        }
    }
    if heap.is_empty() {
        return Ok(QuadratureResult {
            value: 0.0,
            error: 0.0,
            panels: 0,
        });
    }

    loop {
        let (value, error) = heap
            .iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::QuadratureFailure {
                a: lo,
                b: hi,
                estimate: value,
                error,
            });
        }
        if error <= opts.abs_tol.max(opts.rel_tol * value.abs()) {
            return Ok(QuadratureResult {
                value,
                error,
                panels: heap.len(),
            });
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        let exhausted = worst.depth >= opts.max_depth || heap.len() + 2 > opts.max_panels;
        if exhausted || mid <= worst.a || mid >= worst.b {
            return Err(Error::QuadratureFailure {
                a: lo,
                b: hi,
                estimate: value,
                error,
            });
        }
        heap.push(gauss_kronrod(&f, worst.a, mid, worst.depth + 1));
        heap.push(gauss_kronrod(&f, mid, worst.b, worst.depth + 1));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let r = integrate(|x| x.powi(5) - 2.0 * x * x + 1.0, &[0.0, 2.0], &Default::default()).unwrap();
        let exact = 64.0 / 6.0 - 16.0 / 3.0 + 2.0;
        assert!((r.value - exact).abs() < 1e-13);
        assert_eq!(r.panels, 1);
    }

    #[test]
    fn peaked_integrand() {
        // narrow gaussian placed at a breakpoint
        let s = 0.01;
        let f = |x: f64| (-(x - 0.3) * (x - 0.3) / (2.0 * s * s)).exp();
        let r = integrate(f, &[-10.0, 0.3, 10.0], &Default::default()).unwrap();
        let exact = s * (2.0 * std::f64::consts::PI).sqrt();
        assert!(((r.value - exact) / exact).abs() < 1e-10);
    }

    #[test]
    fn empty_and_invalid() {
        let r = integrate(|_| 1.0, &[1.0, 1.0], &Default::default()).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(integrate(|_| 1.0, &[2.0, 1.0], &Default::default()).is_err());
        assert!(integrate(|_| 1.0, &[], &Default::default()).is_err());
    }

    #[test]
    fn singular_integrand_fails_loudly() {
        let opts = QuadratureOptions {
            max_depth: 10,
            ..Default::default()
        };
        assert!(matches!(
            integrate(|x: f64| 1.0 / x.abs().sqrt().max(1e-300).powi(3), &[-1.0, 1.0], &opts),
            Err(Error::QuadratureFailure { .. })
        ));
    }
}
