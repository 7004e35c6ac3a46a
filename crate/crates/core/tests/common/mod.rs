#![allow(dead_code)]

use cyclefind::prelude::*;
use cyclefind::rng::stream;
use rand::Rng;
use rand_distr::{Distribution, Normal};

/// Two-sided Kolmogorov-Smirnov distance between `sample` and `cdf`.
pub fn ks_distance(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic 1% critical value of the one-sample KS distance.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.6276 / (n as f64).sqrt()
}

pub fn chi2_2_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        1.0 - (-x / 2.0).exp()
    }
}

/// Sorted times with random gaps in `[0.2, 1.8)`.
pub fn uneven_times(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = stream(seed);
    let mut t = 0.0;
    (0..n)
        .map(|_| {
            t += rng.random_range(0.2..1.8);
            t
        })
        .collect()
}

pub fn white_noise(times: Vec<f64>, sd: f64, seed: u64) -> TimeSeries {
    let mut rng = stream(seed);
    let normal = Normal::new(0.0, sd).unwrap();
    let values = times.iter().map(|_| normal.sample(&mut rng)).collect();
    TimeSeries::new(times, values).unwrap()
}

/// Noise-free unit sine, period 1, 300 points over 25 time units.
pub fn clean_sine() -> TimeSeries {
    let model = SyntheticModel::new(Signal::sine(1.0), 1.0, 0.0).unwrap();
    let times: Vec<f64> = (0..300).map(|i| i as f64 * 25.0 / 300.0).collect();
    generate(&model, &times, 0).unwrap()
}

pub fn sea_level_grid() -> PeriodGrid {
    make_period_grid(0.5, 2.0, 0.005).unwrap()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
