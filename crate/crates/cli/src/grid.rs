//! `lo:hi:step` grids and comma-separated lists.

use std::str::FromStr;

/// An arithmetic grid. Both endpoints are included when `(hi - lo) / step`
/// is an integer to within `1e-9`; the last point is then exactly `hi`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, step] = parts[..] else {
            return Err(format!("expected lo:hi:step, got '{s}'"));
        };
        let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("bad number '{v}': {e}"));
        let (lo, hi, step) = (num(lo)?, num(hi)?, num(step)?);
        if !(lo.is_finite() && hi.is_finite() && step.is_finite()) {
            return Err("grid bounds and step must be finite".into());
        }
        if !(step > 0.0) || hi < lo {
            return Err(format!("need step > 0 and hi >= lo, got {lo}:{hi}:{step}"));
        }
        let span = (hi - lo) / step;
        if span > 1e7 {
            return Err(format!("grid would have {span:.0} points"));
        }
        let rounded = span.round();
        let points = if (span - rounded).abs() <= 1e-9 {
            let n = rounded as usize;
            (0..=n).map(|i| if i == n { hi } else { lo + i as f64 * step }).collect()
        } else {
            (0..=span.floor() as usize).map(|i| lo + i as f64 * step).collect()
        };
        Ok(Grid(points))
    }
}

/// A comma-separated list of numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct List(pub Vec<f64>);

impl FromStr for List {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|e| format!("bad number '{v}': {e}")))
            .collect::<Result<Vec<_>, _>>()
            .map(List)
    }
}
