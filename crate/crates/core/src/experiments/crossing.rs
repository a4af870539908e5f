//! Monte Carlo estimates of `P(sup_{t >= 0} X(t) > q)` on a grid of levels.
//!
//! All levels share one path ensemble, so the estimates are monotone in `q`.
//! A path is followed until it has exceeded every level, or until it falls
//! `abandon_margin` below its running maximum (a further rise of that size
//! has probability about `exp(-w * margin)`), or until the hard time cap.

use std::ops::ControlFlow;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::rates::decay_rate_closed;
use crate::rng::{exp_draw, RngStream};
use crate::sampler::blocks::{walk_damped, WalkEnd, WalkObserver, WalkState};
use crate::sampler::{draw_initial_up, ProcessKind};

pub const CROSSING_CSV_HEADER: &str = "q,n,hits,p_hat,std_err,truncated";

/// Fraction of truncated paths above which a run is reported as over budget.
const MAX_TRUNCATED_FRACTION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HorizonPolicy {
    /// Stop once the path is this far below its running maximum.
    pub abandon_margin: f64,
    /// Hard cap on simulated time.
    pub t_max: f64,
}

impl HorizonPolicy {
    /// Margin `12 / w` and a cap of `10^4` time units.
    pub fn for_decay_rate(w: f64) -> Self {
        HorizonPolicy {
            abandon_margin: 12.0 / w,
            t_max: 1e4,
        }
    }

    pub fn for_process(kind: ProcessKind, params: &ModelParams) -> Result<Self> {
        Ok(Self::for_decay_rate(decay_rate_closed(kind, params)?))
    }

    /// Heuristic relative bias from abandoned paths, `exp(-w * margin)`.
    pub fn residual_bias(&self, w: f64) -> f64 {
        (-w * self.abandon_margin).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingEstimate {
    pub q: f64,
    pub n_paths: u64,
    pub hits: u64,
    pub p_hat: f64,
    pub std_err: f64,
    /// Paths cut by the time cap before exceeding `q` or being abandoned.
    pub truncated: u64,
}

impl CrossingEstimate {
    pub fn new(q: f64, n_paths: u64, hits: u64, truncated: u64) -> Self {
        let p_hat = hits as f64 / n_paths as f64;
        CrossingEstimate {
            q,
            n_paths,
            hits,
            p_hat,
            std_err: (p_hat * (1.0 - p_hat) / n_paths as f64).sqrt(),
            truncated,
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.q, self.n_paths, self.hits, self.p_hat, self.std_err, self.truncated
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct PathOutcome {
    /// Number of levels the running maximum exceeded.
    levels_hit: usize,
    truncated: bool,
}

#[derive(Debug, Clone, Copy)]
struct Setup<'a> {
    levels: &'a [f64],
    c1: f64,
    c2: f64,
    lambda1: f64,
    lambda2: f64,
    alpha: f64,
    policy: HorizonPolicy,
}

impl Setup<'_> {
    fn count_hits(&self, max: f64, mut hit: usize) -> usize {
        while hit < self.levels.len() && max > self.levels[hit] {
            hit += 1;
        }
        hit
    }
}

fn standard_path(setup: &Setup<'_>, stream: RngStream) -> PathOutcome {
    let mut rng = stream.rng();
    let mut up = draw_initial_up(&mut rng, setup.alpha);
    let (mut time, mut position, mut max) = (0.0_f64, 0.0_f64, 0.0_f64);
    let mut hit = 0;
    let all = setup.levels.len();
    loop {
        let rate = if up { setup.lambda1 } else { setup.lambda2 };
        let mut hold = exp_draw(&mut rng, rate);
        let clipped = time + hold > setup.policy.t_max;
        if clipped {
            hold = setup.policy.t_max - time;
        }
        time += hold;
        if up {
            position += setup.c1 * hold;
            if position > max {
                max = position;
                hit = setup.count_hits(max, hit);
                if hit == all {
                    return PathOutcome { levels_hit: hit, truncated: false };
                }
            }
        } else {
            position -= setup.c2 * hold;
            if position < max - setup.policy.abandon_margin {
                return PathOutcome { levels_hit: hit, truncated: false };
            }
        }
        if clipped {
            return PathOutcome { levels_hit: hit, truncated: true };
        }
        up = !up;
    }
}

struct DampedCrossing<'a> {
    setup: Setup<'a>,
    max: f64,
    hit: usize,
    truncated: bool,
}

impl DampedCrossing<'_> {
    fn abandoned(&self, position: f64) -> bool {
        position < self.max - self.setup.policy.abandon_margin
    }
}

impl WalkObserver for DampedCrossing<'_> {
    fn can_skip(&self, state: &WalkState, up_time: f64, down_time: f64) -> bool {
        // the block cannot climb more than c1 * up_time
        state.position + self.setup.c1 * up_time <= self.setup.levels[self.hit]
            && state.time + up_time + down_time <= self.setup.policy.t_max
    }

    fn segment(&mut self, state: &WalkState, velocity: f64, duration: f64) -> ControlFlow<()> {
        let clipped = state.time + duration > self.setup.policy.t_max;
        let duration = if clipped { self.setup.policy.t_max - state.time } else { duration };
        let end = state.position + velocity * duration;
        if velocity > 0.0 && end > self.max {
            self.max = end;
            self.hit = self.setup.count_hits(end, self.hit);
            if self.hit == self.setup.levels.len() {
                return ControlFlow::Break(());
            }
        }
        if velocity < 0.0 && self.abandoned(end) {
            return ControlFlow::Break(());
        }
        if clipped {
            self.truncated = true;
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    }

    fn skipped(&mut self, state: &WalkState) -> ControlFlow<()> {
        self.max = self.max.max(state.position);
        if self.abandoned(state.position) {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    }
}

fn damped_path(setup: &Setup<'_>, params: &ModelParams, stream: RngStream) -> PathOutcome {
    let mut rng = stream.rng();
    let mut obs = DampedCrossing {
        setup: *setup,
        max: 0.0,
        hit: 0,
        truncated: false,
    };
    let end = walk_damped(params, &mut rng, &mut obs);
    PathOutcome {
        levels_hit: obs.hit,
        truncated: obs.truncated || end == WalkEnd::IndexCap,
    }
}

/// Per-path outcomes tallied by number of levels exceeded.
#[derive(Debug, Clone)]
struct Tally {
    by_levels_hit: Vec<u64>,
    truncated_by_levels_hit: Vec<u64>,
}

impl Tally {
    fn new(levels: usize) -> Self {
        Tally {
            by_levels_hit: vec![0; levels + 1],
            truncated_by_levels_hit: vec![0; levels + 1],
        }
    }

    fn add(mut self, outcome: PathOutcome) -> Self {
        self.by_levels_hit[outcome.levels_hit] += 1;
        if outcome.truncated {
            self.truncated_by_levels_hit[outcome.levels_hit] += 1;
        }
        self
    }

    fn merge(mut self, other: Tally) -> Self {
        for (a, b) in self.by_levels_hit.iter_mut().zip(other.by_levels_hit) {
            *a += b;
        }
        for (a, b) in self.truncated_by_levels_hit.iter_mut().zip(other.truncated_by_levels_hit) {
            *a += b;
        }
        self
    }
}

/// Estimates `P(sup X > q)` for every `q` in `q_grid` from `n_paths` paths.
/// Path `i` uses stream `(seed, i)`; the work is spread over the current
/// rayon pool and the result does not depend on its size.
pub fn estimate_crossing(
    q_grid: &[f64],
    params: &ModelParams,
    kind: ProcessKind,
    n_paths: u64,
    seed: u64,
    policy: HorizonPolicy,
) -> Result<Vec<CrossingEstimate>> {
    let regime = params.regime();
    if !regime.stable {
        return Err(Error::UnstableRegime { drift: regime.drift });
    }
    if q_grid.is_empty()
        || q_grid.iter().any(|q| !(q.is_finite() && *q >= 0.0))
        || q_grid.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(Error::InvalidArgument(
            "levels must be non-negative, finite and strictly increasing".into(),
        ));
    }
    if n_paths == 0 {
        return Err(Error::InvalidArgument("need at least one path".into()));
    }
    if !(policy.abandon_margin > 0.0 && policy.t_max > 0.0) {
        return Err(Error::InvalidArgument("horizon policy needs a positive margin and cap".into()));
    }

    let setup = Setup {
        levels: q_grid,
        c1: params.c1(),
        c2: params.c2(),
        lambda1: params.lambda1(),
        lambda2: params.lambda2(),
        alpha: params.alpha(),
        policy,
    };
    let levels = q_grid.len();
    let tally = (0..n_paths)
        .into_par_iter()
        .fold(
            || Tally::new(levels),
            |acc, i| {
                let stream = RngStream::new(seed, i);
                acc.add(match kind {
                    ProcessKind::Standard => standard_path(&setup, stream),
                    ProcessKind::Damped => damped_path(&setup, params, stream),
                })
            },
        )
        .reduce(|| Tally::new(levels), Tally::merge);

    let estimates: Vec<CrossingEstimate> = q_grid
        .iter()
        .enumerate()
        .map(|(i, &q)| {
            let hits = tally.by_levels_hit[i + 1..].iter().sum();
            let truncated = tally.truncated_by_levels_hit[..=i].iter().sum();
            CrossingEstimate::new(q, n_paths, hits, truncated)
        })
        .collect();

    let truncated: u64 = tally.truncated_by_levels_hit.iter().sum();
    if truncated as f64 > MAX_TRUNCATED_FRACTION * n_paths as f64 {
        return Err(Error::BudgetExceeded {
            truncated,
            n_paths,
            estimates,
        });
    }
    Ok(estimates)
}
