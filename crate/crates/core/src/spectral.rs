//! Fourier-type periodograms: the classical (Schuster) periodogram and the
//! Lomb-Scargle periodogram, plus the χ²₂ significance level for the latter.
//!
//! Powers are reported per frequency as `Option<f64>`; `None` marks a
//! frequency where the Lomb-Scargle denominators vanish. Those frequencies
//! are never selected as peaks.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::series::TimeSeries;

/// Denominators below this make a Lomb-Scargle power undefined.
pub const LS_DENOMINATOR_FLOOR: f64 = 1e-12;

/// Strictly increasing positive frequencies, in cycles per time unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    frequencies: Vec<f64>,
}

impl FrequencyGrid {
    pub fn new(frequencies: Vec<f64>) -> Result<Self> {
        if frequencies.is_empty() {
            return Err(invalid("frequency grid is empty"));
        }
        if frequencies.iter().any(|f| !(*f > 0.0) || !f.is_finite()) {
            return Err(invalid("frequencies must be positive and finite"));
        }
        if frequencies.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("frequencies must be strictly increasing"));
        }
        Ok(Self { frequencies })
    }

    /// Frequencies `1/p` for the given periods, in increasing frequency order.
    pub fn from_periods(periods: &[f64]) -> Result<Self> {
        let mut frequencies: Vec<f64> = periods.iter().map(|p| 1.0 / p).collect();
        frequencies.sort_by(f64::total_cmp);
        Self::new(frequencies)
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    Unnormalized,
    /// Divided by the population variance of the input values.
    VarianceScaled,
}

/// Power per grid frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralPower {
    pub grid: FrequencyGrid,
    pub power: Vec<Option<f64>>,
    pub normalization: Normalization,
}

impl SpectralPower {
    /// Index and value of the largest defined power; ties go to the lower
    /// frequency index.
    pub fn peak(&self) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (i, p) in self.power.iter().enumerate() {
            if let Some(p) = *p {
                if best.is_none_or(|(_, b)| p > b) {
                    best = Some((i, p));
                }
            }
        }
        best
    }

    /// Rescales an unnormalized spectrum by `1 / variance`.
    pub fn variance_scaled(&self, variance: f64) -> Result<Self> {
        if self.normalization == Normalization::VarianceScaled {
            return Ok(self.clone());
        }
        if !(variance > 0.0) {
            return Err(Error::DegenerateInput("variance must be positive".into()));
        }
        Ok(Self {
            grid: self.grid.clone(),
            power: self.power.iter().map(|p| p.map(|p| p / variance)).collect(),
            normalization: Normalization::VarianceScaled,
        })
    }
}

fn clamp_slack(p: f64) -> f64 {
    if p < 0.0 && p > -1e-12 {
        0.0
    } else {
        p
    }
}

/// `P_S(f) = (1/N) [(Σ y sin 2πft)² + (Σ y cos 2πft)²]`.
pub fn classical_power(series: &TimeSeries, frequency: f64) -> f64 {
    let omega = TAU * frequency;
    let (mut s, mut c) = (0.0, 0.0);
    for (t, y) in series.iter() {
        let (sin, cos) = (omega * t).sin_cos();
        s += y * sin;
        c += y * cos;
    }
    clamp_slack((s * s + c * c) / series.len() as f64)
}

pub fn classical_periodogram(series: &TimeSeries, grid: &FrequencyGrid) -> Result<SpectralPower> {
    if grid.is_empty() {
        return Err(invalid("frequency grid is empty"));
    }
    Ok(SpectralPower {
        grid: grid.clone(),
        power: grid
            .frequencies()
            .iter()
            .map(|&f| Some(classical_power(series, f)))
            .collect(),
        normalization: Normalization::Unnormalized,
    })
}

/// How the Lomb-Scargle numerator sums enter the power.
///
/// `Literal` drops the squares on the numerator sums. It is not a
/// periodogram (it can go negative) and exists only to compare against the
/// squared form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LsNumerator {
    #[default]
    Squared,
    Literal,
}

/// Intermediate sums of the Lomb-Scargle fit at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LombScargleAux {
    pub tau: f64,
    /// Σ yc cos 2πf(t-τ)
    pub sum_cos: f64,
    /// Σ yc sin 2πf(t-τ)
    pub sum_sin: f64,
    pub sum_cos2: f64,
    pub sum_sin2: f64,
    /// Amplitude of the fitted sinusoid, when both denominators are usable.
    pub amplitude: Option<f64>,
    /// `φ` such that the fit is `amplitude * sin(2πf(t - φ))`.
    pub phase_offset: Option<f64>,
}

impl LombScargleAux {
    fn defined(&self) -> bool {
        self.sum_cos2 >= LS_DENOMINATOR_FLOOR && self.sum_sin2 >= LS_DENOMINATOR_FLOOR
    }

    fn power(&self, numerator: LsNumerator) -> Option<f64> {
        if !self.defined() {
            return None;
        }
        Some(match numerator {
            LsNumerator::Squared => clamp_slack(
                0.5 * (self.sum_cos * self.sum_cos / self.sum_cos2
                    + self.sum_sin * self.sum_sin / self.sum_sin2),
            ),
            LsNumerator::Literal => 0.5 * (self.sum_cos / self.sum_cos2 + self.sum_sin / self.sum_sin2),
        })
    }
}

/// Mean-centred (or raw) values used by the Lomb-Scargle sums.
fn ls_values(series: &TimeSeries, center: bool) -> Vec<f64> {
    let mean = if center { series.mean() } else { 0.0 };
    series.values().iter().map(|y| y - mean).collect()
}

fn ls_aux_with(times: &[f64], values: &[f64], frequency: f64) -> LombScargleAux {
    let omega = TAU * frequency;
    let (mut s2, mut c2) = (0.0, 0.0);
    for &t in times {
        let (sin, cos) = (2.0 * omega * t).sin_cos();
        s2 += sin;
        c2 += cos;
    }
    let tau = s2.atan2(c2) / (4.0 * PI * frequency);

    let (mut sum_cos, mut sum_sin, mut sum_cos2, mut sum_sin2) = (0.0, 0.0, 0.0, 0.0);
    for (&t, &y) in times.iter().zip(values) {
        let (sin, cos) = (omega * (t - tau)).sin_cos();
        sum_cos += y * cos;
        sum_sin += y * sin;
        sum_cos2 += cos * cos;
        sum_sin2 += sin * sin;
    }
    let mut aux = LombScargleAux {
        tau,
        sum_cos,
        sum_sin,
        sum_cos2,
        sum_sin2,
        amplitude: None,
        phase_offset: None,
    };
    if aux.defined() {
        let a = sum_cos / sum_cos2;
        let b = sum_sin / sum_sin2;
        // a cos(x) + b sin(x) = A sin(x + ψ)
        aux.amplitude = Some(a.hypot(b));
        aux.phase_offset = Some(tau - a.atan2(b) / omega);
    }
    aux
}

/// Sums behind the Lomb-Scargle power at one frequency.
pub fn lomb_scargle_aux(series: &TimeSeries, frequency: f64, center: bool) -> LombScargleAux {
    ls_aux_with(series.times(), &ls_values(series, center), frequency)
}

/// Lomb-Scargle power at one frequency (`None` when undefined).
pub fn lomb_scargle_power(series: &TimeSeries, frequency: f64, center: bool) -> Option<f64> {
    lomb_scargle_aux(series, frequency, center).power(LsNumerator::Squared)
}

/// Lomb-Scargle periodogram over `grid`.
pub fn lomb_scargle(series: &TimeSeries, grid: &FrequencyGrid, center: bool) -> Result<SpectralPower> {
    lomb_scargle_with(series, grid, center, LsNumerator::Squared)
}

pub fn lomb_scargle_with(
    series: &TimeSeries,
    grid: &FrequencyGrid,
    center: bool,
    numerator: LsNumerator,
) -> Result<SpectralPower> {
    if series.len() < 3 {
        return Err(Error::InsufficientData(
            "Lomb-Scargle needs at least 3 observations".into(),
        ));
    }
    if grid.is_empty() {
        return Err(invalid("frequency grid is empty"));
    }
    let values = ls_values(series, center);
    Ok(SpectralPower {
        grid: grid.clone(),
        power: grid
            .frequencies()
            .iter()
            .map(|&f| ls_aux_with(series.times(), &values, f).power(numerator))
            .collect(),
        normalization: Normalization::Unnormalized,
    })
}

/// Power level exceeded with probability `alpha` at a single frequency when
/// the data are white Gaussian noise of variance `noise_variance`.
///
/// Under that null `2P/σ²` is χ²₂, so `P(P > x) = exp(-x/σ²)` and the level
/// is `-σ² ln α`.
pub fn ls_significance_threshold(alpha: f64, noise_variance: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid(format!("alpha must be in (0, 1), got {alpha}")));
    }
    if !(noise_variance > 0.0) || !noise_variance.is_finite() {
        return Err(invalid(format!(
            "noise variance must be positive, got {noise_variance}"
        )));
    }
    Ok(-alpha.ln() * noise_variance)
}
