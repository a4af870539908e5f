//! Exact block walker for the damped process.
//!
//! Write `W_k` for iid unit exponentials. The rightward holding times of the
//! damped process are `W_k / (lambda1 k)`, so the total rightward time spent
//! in pairs `a..=b` is `E / lambda1` with `E = sum_{k=a..=b} W_k / k`. By the
//! Renyi representation of exponential order statistics,
//!
//! ```text
//! E  ~  -ln V,    V ~ Beta(a, b - a + 1),
//! ```
//!
//! and, given `E`, the partial sum over the upper half `m+1..=b` is an order
//! statistic of `b - a` unit exponentials truncated to `[0, E]`. A block can
//! therefore be drawn in O(1) and, when its interior matters, split into
//! halves by sampling from the exact conditional law. Leftward times are
//! handled the same way with `lambda2`.
//!
//! The walk simulates the first pairs one by one, then doubles the block
//! size. An observer decides which blocks may be applied wholesale; the
//! others are bisected down to single pairs.
//!
//! Deep in a walk single pairs last far less than one ulp of the elapsed
//! time, so time and position are carried as compensated sums. Without
//! that, sub-ulp blocks are skipped without moving the clock and a bisection
//! near a time threshold can visit millions of them. A block shorter than
//! one ulp of the clock is never bisected: it is resolved as one rightward
//! and one leftward segment, which moves the position by less than
//! `(c1 + c2)` ulps. Pair indices are kept as `f64` so the walk reaches
//! indices far beyond any integer type; they are exact up to `2^53`, and
//! beyond that only the sub-ulp rule ever meets a block.

use std::ops::ControlFlow;

use rand::Rng;
use rand_distr::{Beta, Distribution};

use crate::error::Result;
use crate::params::ModelParams;
use crate::rng::{exp_draw, RngStream};
use crate::sampler::draw_initial_up;

/// Pairs simulated one at a time before blocks kick in.
pub const EXACT_PAIRS: u32 = 16;

/// Beyond this pair index the walk gives up and reports [`WalkEnd::IndexCap`].
pub const MAX_PAIR_INDEX: f64 = 1e300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkState {
    pub time: f64,
    pub position: f64,
}

pub trait WalkObserver {
    /// Whether a block with the given rightward and leftward durations may be
    /// applied without resolving its interior. Blocks of one pair are always
    /// resolved segment by segment.
    fn can_skip(&self, state: &WalkState, up_time: f64, down_time: f64) -> bool;

    /// One exact linear segment starting at `state`.
    fn segment(&mut self, state: &WalkState, velocity: f64, duration: f64) -> ControlFlow<()>;

    /// Called after a block was applied wholesale; `state` is its endpoint.
    fn skipped(&mut self, _state: &WalkState) -> ControlFlow<()> {
        ControlFlow::Continue(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkEnd {
    Stopped,
    IndexCap,
}

struct Walker<'a, R, O> {
    rng: &'a mut R,
    observer: &'a mut O,
    state: WalkState,
    /// Rounding residues of `state.time` and `state.position`.
    time_lo: f64,
    position_lo: f64,
    first_up: bool,
    lambda1: f64,
    lambda2: f64,
    c1: f64,
    c2: f64,
}

/// Sum `sum_{k=a..=b} W_k / k`.
fn block_sum<R: Rng + ?Sized>(rng: &mut R, a: f64, b: f64) -> f64 {
    let v = Beta::new(a, b - a + 1.0)
        .expect("positive shape parameters")
        .sample(rng);
    -v.ln()
}

/// Given `total = sum_{k=a..=b} W_k / k`, draws `sum_{k=m+1..=b} W_k / k`.
fn upper_part<R: Rng + ?Sized>(rng: &mut R, a: f64, m: f64, b: f64, total: f64) -> f64 {
    let v = Beta::new(b - m, m - a + 1.0)
        .expect("positive shape parameters")
        .sample(rng);
    // inverse cdf of Exp(1) truncated to [0, total]
    let upper = -(-v * (-(-total).exp_m1())).ln_1p();
    upper.clamp(0.0, total)
}

/// `hi + lo == a + b` exactly.
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let hi = a + b;
    let bb = hi - a;
    (hi, (a - (hi - bb)) + (b - bb))
}

/// Adds `x` to the compensated sum `(hi, lo)`.
fn accumulate(hi: &mut f64, lo: &mut f64, x: f64) {
    let (s, e) = two_sum(*hi, x);
    let (h, l) = two_sum(s, *lo + e);
    *hi = h;
    *lo = l;
}

impl<R: Rng, O: WalkObserver> Walker<'_, R, O> {
    fn advance(&mut self, duration: f64, displacement: f64) {
        accumulate(&mut self.state.time, &mut self.time_lo, duration);
        accumulate(&mut self.state.position, &mut self.position_lo, displacement);
    }

    fn pair(&mut self, up_time: f64, down_time: f64) -> ControlFlow<()> {
        let segments = if self.first_up {
            [(self.c1, up_time), (-self.c2, down_time)]
        } else {
            [(-self.c2, down_time), (self.c1, up_time)]
        };
        for (velocity, duration) in segments {
            self.observer.segment(&self.state, velocity, duration)?;
            self.advance(duration, velocity * duration);
        }
        ControlFlow::Continue(())
    }

    /// `up` and `down` are in unit-exponential scale (rates divided out).
    fn block(&mut self, a: f64, b: f64, up: f64, down: f64) -> ControlFlow<()> {
        let up_time = up / self.lambda1;
        let down_time = down / self.lambda2;
        let below_resolution = up_time + down_time <= f64::EPSILON * self.state.time;
        if a == b || below_resolution {
            return self.pair(up_time, down_time);
        }
        if self.observer.can_skip(&self.state, up_time, down_time) {
            self.advance(up_time + down_time, self.c1 * up_time - self.c2 * down_time);
            return self.observer.skipped(&self.state);
        }
        let m = a + ((b - a) / 2.0).floor();
        let up_hi = upper_part(self.rng, a, m, b, up);
        let down_hi = upper_part(self.rng, a, m, b, down);
        self.block(a, m, (up - up_hi).max(0.0), (down - down_hi).max(0.0))?;
        self.block(m + 1.0, b, up_hi, down_hi)
    }

    fn run(&mut self) -> WalkEnd {
        for k in 1..=EXACT_PAIRS {
            let kf = f64::from(k);
            let up = exp_draw(self.rng, self.lambda1 * kf);
            let down = exp_draw(self.rng, self.lambda2 * kf);
            if self.pair(up, down).is_break() {
                return WalkEnd::Stopped;
            }
        }
        let mut a = f64::from(EXACT_PAIRS) + 1.0;
        while a <= MAX_PAIR_INDEX {
            let b = 2.0 * a - 1.0;
            let up = block_sum(self.rng, a, b);
            let down = block_sum(self.rng, a, b);
            if self.block(a, b, up, down).is_break() {
                return WalkEnd::Stopped;
            }
            a = b + 1.0;
        }
        WalkEnd::IndexCap
    }
}

/// Walks one damped path from the origin, drawing the initial direction and
/// all randomness from `rng`.
pub fn walk_damped<R: Rng, O: WalkObserver>(params: &ModelParams, rng: &mut R, observer: &mut O) -> WalkEnd {
    let first_up = draw_initial_up(rng, params.alpha());
    let mut walker = Walker {
        rng,
        observer,
        state: WalkState {
            time: 0.0,
            position: 0.0,
        },
        time_lo: 0.0,
        position_lo: 0.0,
        first_up,
        lambda1: params.lambda1(),
        lambda2: params.lambda2(),
        c1: params.c1(),
        c2: params.c2(),
    };
    walker.run()
}

struct PositionAt {
    t: f64,
    value: Option<f64>,
}

impl WalkObserver for PositionAt {
    fn can_skip(&self, state: &WalkState, up_time: f64, down_time: f64) -> bool {
        state.time + up_time + down_time < self.t
    }

    fn segment(&mut self, state: &WalkState, velocity: f64, duration: f64) -> ControlFlow<()> {
        if state.time + duration >= self.t {
            self.value = Some(state.position + velocity * (self.t - state.time));
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    }
}

/// Exact draw of `D(t)`.
pub(crate) fn damped_position(params: &ModelParams, t: f64, stream: RngStream) -> Result<f64> {
    let mut rng = stream.rng();
    let mut obs = PositionAt { t, value: None };
    match walk_damped(params, &mut rng, &mut obs) {
        WalkEnd::Stopped => Ok(obs.value.expect("stopped walks record a value")),
        WalkEnd::IndexCap => Err(crate::error::Error::ExplosionGuardTripped { cap: MAX_PAIR_INDEX }),
    }
}
