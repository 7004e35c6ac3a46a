//! Time series data model, phase folding and synthetic data.
//!
//! A [`TimeSeries`] is a set of `(time, value)` observations sorted by time.
//! Folding at a trial period maps each time onto a phase in `[0, 1)`; a
//! correct period stacks every cycle on top of the others.

use std::f64::consts::TAU;

use rand::seq::index;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng;

/// Ordered observations `(t_n, y_n)`, possibly unevenly spaced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    times: Vec<f64>,
    values: Vec<f64>,
    label: String,
}

impl TimeSeries {
    /// Builds a series; requires `N >= 2`, equal lengths, non-decreasing
    /// finite times and finite values.
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::with_label(times, values, String::new())
    }

    pub fn with_label(times: Vec<f64>, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(invalid(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "a series needs at least 2 observations, got {}",
                times.len()
            )));
        }
        if let Some(i) = times.iter().position(|t| !t.is_finite()) {
            return Err(invalid(format!("time at index {i} is not finite")));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!("value at index {i} is not finite")));
        }
        if let Some(i) = times.windows(2).position(|w| w[1] < w[0]) {
            return Err(invalid(format!("times decrease at index {}", i + 1)));
        }
        Ok(Self {
            times,
            values,
            label: label.into(),
        })
    }

    /// Builds a series from unordered pairs, sorting stably by time.
    pub fn from_unsorted(mut pairs: Vec<(f64, f64)>, label: impl Into<String>) -> Result<Self> {
        if pairs.iter().any(|(t, _)| t.is_nan()) {
            return Err(invalid("time is NaN"));
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (times, values) = pairs.into_iter().unzip();
        Self::with_label(times, values, label)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Last time minus first time.
    pub fn duration(&self) -> f64 {
        self.times[self.times.len() - 1] - self.times[0]
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    /// Population variance `(1/N) Σ (y - ȳ)²`.
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / self.len() as f64
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied())
    }

    /// Same times, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::with_label(self.times.clone(), values, self.label.clone())
    }

    /// Applies `f` to every value.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        self.with_values(self.values.iter().map(|&v| f(v)).collect())
    }

    /// Shifts every time by `delta`.
    pub fn shift_times(&self, delta: f64) -> Result<Self> {
        Self::with_label(
            self.times.iter().map(|t| t + delta).collect(),
            self.values.clone(),
            self.label.clone(),
        )
    }

    /// Removes an ordinary least-squares line in time.
    pub fn detrend_linear(&self) -> Result<Self> {
        let n = self.len() as f64;
        let t_mean = self.times.iter().sum::<f64>() / n;
        let y_mean = self.mean();
        let (mut sxx, mut sxy) = (0.0, 0.0);
        for (t, y) in self.iter() {
            sxx += (t - t_mean).powi(2);
            sxy += (t - t_mean) * (y - y_mean);
        }
        let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
        self.with_values(
            self.iter()
                .map(|(t, y)| y - y_mean - slope * (t - t_mean))
                .collect(),
        )
    }
}

/// Observations mapped to phase space for one trial period.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasedSeries {
    phases: Vec<f64>,
    values: Vec<f64>,
    sorted: bool,
    source_period: f64,
}

impl PhasedSeries {
    /// Builds a phased series directly. Phases must lie in `[0, 1)`; the
    /// `sorted` flag is computed, not trusted.
    pub fn new(phases: Vec<f64>, values: Vec<f64>, source_period: f64) -> Result<Self> {
        if phases.len() != values.len() {
            return Err(invalid("phase and value lengths differ"));
        }
        if let Some(p) = phases.iter().find(|p| !(0.0..1.0).contains(*p)) {
            return Err(invalid(format!("phase {p} outside [0, 1)")));
        }
        let sorted = phases.windows(2).all(|w| w[0] <= w[1]);
        Ok(Self {
            phases,
            values,
            sorted,
            source_period,
        })
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_sorted(&self) -> bool {
        self.sorted
    }

    pub fn source_period(&self) -> f64 {
        self.source_period
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub(crate) fn require_sorted(&self) -> Result<()> {
        if self.sorted {
            Ok(())
        } else {
            Err(invalid("phased series must be sorted by phase"))
        }
    }
}

/// `(t / p) mod 1`, always in `[0, 1)`.
pub fn fold_phase(t: f64, period: f64) -> Result<f64> {
    if !(period > 0.0) || !period.is_finite() {
        return Err(invalid(format!("period must be positive, got {period}")));
    }
    if !t.is_finite() {
        return Err(invalid("time is not finite"));
    }
    Ok(phase_unchecked(t, period))
}

#[inline]
pub(crate) fn phase_unchecked(t: f64, period: f64) -> f64 {
    let phase = (t / period).rem_euclid(1.0);
    // rem_euclid rounds up to exactly 1.0 for tiny negative quotients.
    if phase >= 1.0 {
        0.0
    } else {
        phase
    }
}

/// Folds a series at `period` and sorts by phase. Ties keep time order.
pub fn fold_series(series: &TimeSeries, period: f64) -> Result<PhasedSeries> {
    fold_phase(series.times()[0], period)?;
    let mut pairs: Vec<(f64, f64)> = series
        .iter()
        .map(|(t, y)| (phase_unchecked(t, period), y))
        .collect();
    // sort_by is stable
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (phases, values) = pairs.into_iter().unzip();
    Ok(PhasedSeries {
        phases,
        values,
        sorted: true,
        source_period: period,
    })
}

/// Random subsampling without replacement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingSpec {
    pub proportion: f64,
    pub seed: u64,
}

impl SamplingSpec {
    pub fn new(proportion: f64, seed: u64) -> Result<Self> {
        if !(proportion > 0.0 && proportion <= 1.0) {
            return Err(invalid(format!(
                "proportion must be in (0, 1], got {proportion}"
            )));
        }
        Ok(Self { proportion, seed })
    }

    /// Number of points kept from `n`: `floor(n * proportion + 0.5)`.
    pub fn count(&self, n: usize) -> usize {
        (n as f64 * self.proportion + 0.5).floor() as usize
    }
}

/// Keeps a seeded uniform random subset of the observations, in time order.
pub fn subsample(series: &TimeSeries, spec: &SamplingSpec) -> Result<TimeSeries> {
    let spec = SamplingSpec::new(spec.proportion, spec.seed)?;
    let n = series.len();
    let count = spec.count(n).min(n);
    if count < 2 {
        return Err(invalid(format!(
            "subsample of {n} points at proportion {} keeps {count} (< 2)",
            spec.proportion
        )));
    }
    if count == n {
        return Ok(series.clone());
    }
    let mut rng = rng::stream(spec.seed);
    let mut picked = index::sample(&mut rng, n, count).into_vec();
    picked.sort_unstable();
    TimeSeries::with_label(
        picked.iter().map(|&i| series.times()[i]).collect(),
        picked.iter().map(|&i| series.values()[i]).collect(),
        series.label(),
    )
}

fn gaussian(sd: f64) -> Result<Normal<f64>> {
    Normal::new(0.0, sd).map_err(|e| invalid(format!("noise sd {sd}: {e}")))
}

/// Adds i.i.d. `N(0, sd²)` noise to every value.
pub fn add_noise(series: &TimeSeries, sd: f64, seed: u64) -> Result<TimeSeries> {
    if !(sd >= 0.0) || !sd.is_finite() {
        return Err(invalid(format!("noise sd must be >= 0, got {sd}")));
    }
    if sd == 0.0 {
        return Ok(series.clone());
    }
    let normal = gaussian(sd)?;
    let mut rng = rng::stream(seed);
    series.with_values(
        series
            .values()
            .iter()
            .map(|v| v + normal.sample(&mut rng))
            .collect(),
    )
}

/// Periodic signal shapes with unit period in phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum Signal {
    /// `baseline + amplitude * sin(2π(phase + offset))`
    Sine {
        amplitude: f64,
        offset: f64,
        baseline: f64,
    },
    /// Symmetric triangle wave, peak `baseline + amplitude` at phase 0.5.
    Triangle { amplitude: f64, baseline: f64 },
}

impl Signal {
    pub fn sine(amplitude: f64) -> Self {
        Signal::Sine {
            amplitude,
            offset: 0.0,
            baseline: 0.0,
        }
    }

    /// Value at `phase` (any real; only its fractional part matters).
    pub fn at_phase(&self, phase: f64) -> f64 {
        match *self {
            Signal::Sine {
                amplitude,
                offset,
                baseline,
            } => baseline + amplitude * (TAU * (phase + offset)).sin(),
            Signal::Triangle {
                amplitude,
                baseline,
            } => {
                let x = phase.rem_euclid(1.0);
                baseline + amplitude * (1.0 - 2.0 * (x - 0.5).abs()) * 2.0 - amplitude
            }
        }
    }
}

/// A periodic signal plus white Gaussian noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticModel {
    pub signal: Signal,
    pub true_period: f64,
    pub noise_sd: f64,
}

impl SyntheticModel {
    pub fn new(signal: Signal, true_period: f64, noise_sd: f64) -> Result<Self> {
        if !(true_period > 0.0) {
            return Err(invalid("true period must be positive"));
        }
        if !(noise_sd >= 0.0) {
            return Err(invalid("noise sd must be >= 0"));
        }
        Ok(Self {
            signal,
            true_period,
            noise_sd,
        })
    }

    /// Noise-free value at time `t`.
    pub fn value_at(&self, t: f64) -> f64 {
        self.signal.at_phase(t / self.true_period)
    }
}

/// Samples `model` at `times`, adding seeded noise.
pub fn generate(model: &SyntheticModel, times: &[f64], seed: u64) -> Result<TimeSeries> {
    if times.is_empty() {
        return Err(invalid("no sample times"));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("sample times must be sorted"));
    }
    let model = SyntheticModel::new(model.signal, model.true_period, model.noise_sd)?;
    let mut values: Vec<f64> = times.iter().map(|&t| model.value_at(t)).collect();
    if model.noise_sd > 0.0 {
        let normal = gaussian(model.noise_sd)?;
        let mut rng = rng::stream(seed);
        values.iter_mut().for_each(|v| *v += normal.sample(&mut rng));
    }
    TimeSeries::new(times.to_vec(), values)
}

/// `n` evenly spaced times `start, start + step, ...`.
pub fn regular_times(n: usize, start: f64, step: f64) -> Vec<f64> {
    (0..n).map(|i| start + i as f64 * step).collect()
}
