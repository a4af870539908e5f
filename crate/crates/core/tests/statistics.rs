//! Monte Carlo checks of the samplers and estimators against exact laws.
//! Every check uses a fixed seed and a 4-sigma band.

use rayon::prelude::*;
use telegraph_core::experiments::{estimate_crossing, standard_mean_over_t, HorizonPolicy};
use telegraph_core::{sample_path, sample_position, LawOfD, ModelParams, ProcessKind, RngStream};

fn z(estimate: f64, exact: f64, se: f64) -> f64 {
    (estimate - exact).abs() / se
}

#[test]
fn standard_switch_count_is_poisson_for_equal_rates() {
    let p = ModelParams::new(1.7, 1.7, 1.0, 0.6, 0.3).unwrap();
    let (t, n) = (3.0, 200_000u64);
    let counts: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let s = sample_path(ProcessKind::Standard, &p, t, RngStream::new(11, i)).unwrap();
            s.switch_count(t).unwrap() as f64
        })
        .collect();
    let mean = counts.iter().sum::<f64>() / n as f64;
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let lambda_t = 1.7 * t;
    assert!(z(mean, lambda_t, (lambda_t / n as f64).sqrt()) < 4.0, "mean {mean}");
    // variance of the sample variance of a Poisson(m) is about (m + 2 m^2) / n
    let var_se = ((lambda_t + 2.0 * lambda_t * lambda_t) / n as f64).sqrt();
    assert!(z(var, lambda_t, var_se) < 4.0, "var {var}");
    let zeros = counts.iter().filter(|&&c| c == 0.0).count() as f64 / n as f64;
    let p0 = (-lambda_t).exp();
    assert!(z(zeros, p0, (p0 * (1.0 - p0) / n as f64).sqrt()) < 4.0);
}

#[test]
fn damped_first_holding_time() {
    // starting upward, no switch by time 1 has probability exp(-lambda1)
    let p = ModelParams::new(1.0, 2.5, 1.0, 1.0, 1.0).unwrap();
    let n = 200_000u64;
    let still = (0..n)
        .into_par_iter()
        .filter(|&i| {
            sample_path(ProcessKind::Damped, &p, 1.0, RngStream::new(12, i))
                .unwrap()
                .switch_epochs()
                .is_empty()
        })
        .count() as f64
        / n as f64;
    let e = (-1.0_f64).exp();
    assert!(z(still, e, (e * (1.0 - e) / n as f64).sqrt()) < 4.0, "{still}");
}

#[test]
fn damped_second_segment_rate() {
    // starting downward, the first switch has rate lambda2 and the second
    // (back to downward after an upward run) is driven by lambda1;
    // holding times are censored at the horizon, so use exposure-based rates
    let p = ModelParams::new(0.8, 2.0, 1.0, 1.0, 0.0).unwrap();
    let horizon = 4.0;
    let n = 100_000u64;
    let (events, exposure) = (0..n)
        .into_par_iter()
        .map(|i| {
            let s = sample_path(ProcessKind::Damped, &p, horizon, RngStream::new(13, i)).unwrap();
            let e = s.switch_epochs();
            let first = e.first().copied();
            let second = e.get(1).copied();
            let mut ev = [0u64; 2];
            let mut ex = [0.0f64; 2];
            ex[0] = first.unwrap_or(horizon);
            if let Some(f) = first {
                ev[0] = 1;
                ex[1] = second.unwrap_or(horizon) - f;
                ev[1] = u64::from(second.is_some());
            }
            (ev, ex)
        })
        .reduce(
            || ([0, 0], [0.0, 0.0]),
            |(a, x), (b, y)| ([a[0] + b[0], a[1] + b[1]], [x[0] + y[0], x[1] + y[1]]),
        );
    for (k, rate) in [2.0, 0.8].into_iter().enumerate() {
        let r = events[k] as f64 / exposure[k];
        let se = r / (events[k] as f64).sqrt();
        assert!(z(r, rate, se) < 4.0, "segment {k}: {r} vs {rate}");
    }
}

fn cdf_agreement(p: &ModelParams, t: f64, n: u64, seed: u64, draw: impl Fn(u64) -> f64 + Sync) {
    let mut xs: Vec<f64> = (0..n).into_par_iter().map(&draw).collect();
    xs.sort_by(f64::total_cmp);
    let law = LawOfD::new(p, t).unwrap();
    let (lo, hi) = law.support();
    for k in 1..20 {
        let probe = lo + (hi - lo) * k as f64 / 20.0;
        let exact = law.cdf(probe).unwrap();
        let emp = xs.partition_point(|&x| x <= probe) as f64 / n as f64;
        let se = (exact * (1.0 - exact) / n as f64).sqrt().max(1e-12);
        assert!(z(emp, exact, se) < 4.0, "seed {seed}, t {t}, probe {probe}: {emp} vs {exact}");
    }
}

#[test]
fn block_walker_matches_exact_law() {
    let p = ModelParams::new(1.3, 0.7, 1.5, 0.8, 0.35).unwrap();
    for t in [0.7, 4.0, 20.0] {
        cdf_agreement(&p, t, 200_000, 14, |i| {
            sample_position(ProcessKind::Damped, &p, t, RngStream::new(14, i)).unwrap()
        });
    }
}

#[test]
fn block_walker_matches_exact_law_deep_in_the_walk() {
    // around 2^70 pairs by t = 60: blocks shorter than an ulp are resolved whole
    let p = ModelParams::new(4.0, 4.0, 1.0, 1.2, 0.5).unwrap();
    cdf_agreement(&p, 60.0, 100_000, 22, |i| {
        sample_position(ProcessKind::Damped, &p, 60.0, RngStream::new(22, i)).unwrap()
    });
}

#[test]
fn skeletons_match_exact_law() {
    let p = ModelParams::baseline().with_alpha(0.8).unwrap();
    for t in [0.5, 3.0] {
        cdf_agreement(&p, t, 200_000, 15, |i| {
            let s = sample_path(ProcessKind::Damped, &p, t, RngStream::new(15, i)).unwrap();
            s.position_at(t).unwrap()
        });
    }
}

#[test]
fn damped_mean_at_long_horizon() {
    let p = ModelParams::new(2.0, 1.0, 1.0, 1.5, 0.9).unwrap();
    let (t, n) = (60.0, 50_000u64);
    let xs: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| sample_position(ProcessKind::Damped, &p, t, RngStream::new(16, i)).unwrap())
        .collect();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
    let exact = LawOfD::new(&p, t).unwrap().mean().unwrap();
    assert!(z(mean, exact, sd / (n as f64).sqrt()) < 4.0, "{mean} vs {exact}");
}

#[test]
fn standard_mean_matches_closed_form() {
    let p = ModelParams::new(0.9, 1.4, 2.0, 0.7, 0.15).unwrap();
    let (t, n) = (2.5, 200_000u64);
    let xs: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| sample_position(ProcessKind::Standard, &p, t, RngStream::new(17, i)).unwrap() / t)
        .collect();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
    assert!(z(mean, standard_mean_over_t(&p, t), sd / (n as f64).sqrt()) < 4.0);
}

#[test]
fn crossing_level_zero_and_first_segment_bound() {
    let p = ModelParams::baseline();
    let q: Vec<f64> = vec![0.0, 1.0, 2.0, 3.0, 4.0];
    let policy = HorizonPolicy::for_process(ProcessKind::Damped, &p).unwrap();
    let est = estimate_crossing(&q, &p, ProcessKind::Damped, 400_000, 18, policy).unwrap();
    assert!(est[0].p_hat >= p.alpha() - 3.0 * est[0].std_err);
    for e in &est {
        // the first upward segment alone exceeds q with probability alpha e^{-lambda1 q / c1}
        assert!(e.p_hat >= 0.5 * (-e.q).exp() - 3.0 * e.std_err, "{e:?}");
    }
}

#[test]
fn crossing_estimates_match_finite_horizon_skeletons() {
    // standard process: with a long time cap and no abandonment, the
    // streaming estimator sees the same running maximum as explicit paths
    let p = ModelParams::baseline();
    let horizon = 30.0;
    let policy = HorizonPolicy {
        abandon_margin: 1e9,
        t_max: horizon,
    };
    let n = 100_000u64;
    let q = [0.5, 2.0, 4.0];
    // every path hits the cap, so the budget error carries the estimates
    let est = match estimate_crossing(&q, &p, ProcessKind::Standard, n, 19, policy) {
        Err(telegraph_core::Error::BudgetExceeded { estimates, .. }) => estimates,
        other => panic!("expected a budget error, got {other:?}"),
    };
    for (e, &level) in est.iter().zip(&q) {
        let direct = (0..n)
            .into_par_iter()
            .filter(|&i| {
                let s = sample_path(ProcessKind::Standard, &p, horizon, RngStream::new(20, i)).unwrap();
                s.running_max(horizon).unwrap() > level
            })
            .count() as f64
            / n as f64;
        let se = (2.0 * direct * (1.0 - direct) / n as f64).sqrt();
        assert!(z(e.p_hat, direct, se) < 4.0, "q {level}: {} vs {direct}", e.p_hat);
    }
}
