//! Exact path sampling for the damped and the standard telegraph process.
//!
//! A path is stored as its skeleton: the initial direction and the ordered
//! switch epochs up to a horizon. Positions are piecewise linear and are
//! recomputed from the skeleton on demand, so every query below is exact.
//!
//! The damped process accelerates: the `k`-th holding time in each direction
//! has rate `lambda * k`, so the switch count grows exponentially in time.
//! Skeletons are therefore only practical on short horizons; long damped runs
//! go through [`blocks`], which resolves the path only where it matters.

pub mod blocks;

use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::rng::{exp_draw, RngStream};

/// Hard cap on switches in one skeleton.
pub const MAX_SWITCHES: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProcessKind {
    Damped,
    Standard,
}

impl std::fmt::Display for ProcessKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ProcessKind::Damped => "damped",
            ProcessKind::Standard => "standard",
        })
    }
}

impl std::str::FromStr for ProcessKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "damped" => Ok(ProcessKind::Damped),
            "standard" => Ok(ProcessKind::Standard),
            other => Err(Error::InvalidArgument(format!(
                "unknown process kind `{other}` (expected damped or standard)"
            ))),
        }
    }
}

/// A piecewise-linear trajectory on `[0, horizon]`, starting at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSkeleton {
    kind: ProcessKind,
    c1: f64,
    c2: f64,
    initial_up: bool,
    switch_epochs: Vec<f64>,
    horizon: f64,
}

impl PathSkeleton {
    /// Builds a skeleton from explicit parts. Epochs must be strictly
    /// increasing, positive and not beyond the horizon.
    pub fn from_parts(
        kind: ProcessKind,
        params: &ModelParams,
        initial_up: bool,
        switch_epochs: Vec<f64>,
        horizon: f64,
    ) -> Result<Self> {
        check_horizon(horizon)?;
        let mut prev = 0.0;
        for &s in &switch_epochs {
            if !(s > prev && s <= horizon) {
                return Err(Error::InvalidArgument(format!(
                    "switch epochs must be strictly increasing in (0, {horizon}]"
                )));
            }
            prev = s;
        }
        Ok(PathSkeleton {
            kind,
            c1: params.c1(),
            c2: params.c2(),
            initial_up,
            switch_epochs,
            horizon,
        })
    }

    pub fn kind(&self) -> ProcessKind {
        self.kind
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn initial_up(&self) -> bool {
        self.initial_up
    }

    pub fn initial_velocity(&self) -> f64 {
        if self.initial_up {
            self.c1
        } else {
            -self.c2
        }
    }

    pub fn switch_epochs(&self) -> &[f64] {
        &self.switch_epochs
    }

    fn velocity_of_segment(&self, index: usize) -> f64 {
        if self.initial_up == (index % 2 == 0) {
            self.c1
        } else {
            -self.c2
        }
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if (0.0..=self.horizon).contains(&t) {
            Ok(())
        } else {
            Err(Error::TimeOutOfRange {
                t,
                horizon: self.horizon,
            })
        }
    }

    /// Corner points `(time, position, velocity after the corner)`, starting
    /// at the origin; the horizon itself is not included.
    pub fn corners(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let mut time = 0.0;
        let mut position = 0.0;
        std::iter::once(0.0)
            .chain(self.switch_epochs.iter().copied())
            .enumerate()
            .map(move |(i, epoch)| {
                if i > 0 {
                    position += self.velocity_of_segment(i - 1) * (epoch - time);
                    time = epoch;
                }
                (time, position, self.velocity_of_segment(i))
            })
    }

    pub fn position_at(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        let mut last = (0.0, 0.0, self.initial_velocity());
        for corner in self.corners() {
            if corner.0 > t {
                break;
            }
            last = corner;
        }
        Ok(last.1 + last.2 * (t - last.0))
    }

    /// Exact supremum of the path on `[0, upto]`.
    pub fn running_max(&self, upto: f64) -> Result<f64> {
        self.check_time(upto)?;
        let mut max = 0.0_f64;
        let mut last = (0.0, 0.0, self.initial_velocity());
        for corner in self.corners() {
            if corner.0 > upto {
                break;
            }
            max = max.max(corner.1);
            last = corner;
        }
        Ok(max.max(last.1 + last.2 * (upto - last.0)))
    }

    /// Maximum over the integer times `0, 1, ..., floor(upto)`.
    pub fn integer_grid_max(&self, upto: f64) -> Result<f64> {
        self.check_time(upto)?;
        let mut max = 0.0_f64;
        let mut corners = self.corners().peekable();
        let mut current = corners.next().expect("origin corner");
        let mut n = 1.0;
        while n <= upto {
            while let Some(next) = corners.peek() {
                if next.0 > n {
                    break;
                }
                current = *next;
                corners.next();
            }
            max = max.max(current.1 + current.2 * (n - current.0));
            n += 1.0;
        }
        Ok(max)
    }

    pub fn switch_count(&self, t: f64) -> Result<usize> {
        self.check_time(t)?;
        Ok(self.switch_epochs.partition_point(|&s| s <= t))
    }

    /// Writes `path_id, epoch_index, time, position, velocity` rows: the
    /// origin, every switch, and a closing row at the horizon.
    pub fn write_csv_rows<W: Write>(&self, path_id: u64, out: &mut W) -> std::io::Result<()> {
        let mut last = (0.0, 0.0, self.initial_velocity());
        let mut count = 0;
        for (i, corner) in self.corners().enumerate() {
            writeln!(out, "{path_id},{i},{},{},{}", corner.0, corner.1, corner.2)?;
            last = corner;
            count = i + 1;
        }
        let end = last.1 + last.2 * (self.horizon - last.0);
        writeln!(out, "{path_id},{count},{},{},{}", self.horizon, end, last.2)
    }
}

pub const PATH_CSV_HEADER: &str = "path_id,epoch_index,time,position,velocity";

fn check_horizon(horizon: f64) -> Result<()> {
    if horizon.is_finite() && horizon > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveHorizon(horizon))
    }
}

/// Holding-time rate of segment `index` (0-based).
#[inline]
pub(crate) fn segment_rate(kind: ProcessKind, params: &ModelParams, first_up: bool, index: usize) -> f64 {
    let up = first_up == (index % 2 == 0);
    let base = if up { params.lambda1() } else { params.lambda2() };
    match kind {
        ProcessKind::Standard => base,
        ProcessKind::Damped => base * (index / 2 + 1) as f64,
    }
}

#[inline]
pub(crate) fn draw_initial_up<R: Rng + ?Sized>(rng: &mut R, alpha: f64) -> bool {
    rng.random::<f64>() < alpha
}

pub fn sample_path(
    kind: ProcessKind,
    params: &ModelParams,
    horizon: f64,
    stream: RngStream,
) -> Result<PathSkeleton> {
    check_horizon(horizon)?;
    let mut rng = stream.rng();
    let initial_up = draw_initial_up(&mut rng, params.alpha());
    let mut epochs = Vec::new();
    let mut time = 0.0;
    loop {
        let rate = segment_rate(kind, params, initial_up, epochs.len());
        time += exp_draw(&mut rng, rate);
        if time > horizon {
            break;
        }
        if epochs.len() == MAX_SWITCHES {
            return Err(Error::ExplosionGuardTripped { cap: MAX_SWITCHES as f64 });
        }
        epochs.push(time);
    }
    Ok(PathSkeleton {
        kind,
        c1: params.c1(),
        c2: params.c2(),
        initial_up,
        switch_epochs: epochs,
        horizon,
    })
}

pub fn sample_damped_path(params: &ModelParams, horizon: f64, stream: RngStream) -> Result<PathSkeleton> {
    sample_path(ProcessKind::Damped, params, horizon, stream)
}

pub fn sample_standard_path(
    params: &ModelParams,
    horizon: f64,
    stream: RngStream,
) -> Result<PathSkeleton> {
    sample_path(ProcessKind::Standard, params, horizon, stream)
}

/// Draws `X(t)` alone. The standard process walks its switches directly;
/// the damped process uses the block walker, so large `t` stays cheap.
pub fn sample_position(kind: ProcessKind, params: &ModelParams, t: f64, stream: RngStream) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::NonPositiveTime(t));
    }
    match kind {
        ProcessKind::Damped => blocks::damped_position(params, t, stream),
        ProcessKind::Standard => {
            let mut rng = stream.rng();
            let mut up = draw_initial_up(&mut rng, params.alpha());
            let (mut time, mut position) = (0.0, 0.0);
            loop {
                let rate = if up { params.lambda1() } else { params.lambda2() };
                let speed = if up { params.c1() } else { -params.c2() };
                let hold = exp_draw(&mut rng, rate);
                if time + hold >= t {
                    return Ok(position + speed * (t - time));
                }
                time += hold;
                position += speed * hold;
                up = !up;
            }
        }
    }
}
