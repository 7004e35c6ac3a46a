//! Accuracy metrics for a batch of period estimates.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Acceptance rule `|p̂ − p₀| ≤ tolerance`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccuracySpec {
    pub true_period: f64,
    pub tolerance: f64,
    /// Series duration `Δτ`, when the tolerance was derived from it.
    #[serde(default)]
    pub duration: Option<f64>,
    /// Largest acceptable phase drift `δφ_max` over the duration.
    #[serde(default)]
    pub max_phase_offset: Option<f64>,
}

impl AccuracySpec {
    pub fn new(true_period: f64, tolerance: f64) -> Result<Self> {
        if !(true_period > 0.0) {
            return Err(invalid("true period must be positive"));
        }
        if !(tolerance > 0.0) {
            return Err(invalid("tolerance must be positive"));
        }
        Ok(Self {
            true_period,
            tolerance,
            duration: None,
            max_phase_offset: None,
        })
    }

    /// Tolerance `δφ_max · p₀² / Δτ`: the period error that lets the folded
    /// phase drift by at most `δφ_max` across the whole series.
    pub fn from_phase_offset(true_period: f64, duration: f64, max_phase_offset: f64) -> Result<Self> {
        if !(duration > 0.0) || !(max_phase_offset > 0.0) {
            return Err(invalid("duration and phase offset must be positive"));
        }
        let tolerance = max_phase_offset * true_period * true_period / duration;
        Ok(Self {
            duration: Some(duration),
            max_phase_offset: Some(max_phase_offset),
            ..Self::new(true_period, tolerance)?
        })
    }

    pub fn accepts(&self, estimate: f64) -> bool {
        // grid points are sums of float steps; forgive representation error
        (estimate - self.true_period).abs() <= self.tolerance + 1e-12 * self.true_period
    }
}

/// Mean of `(p̂ − p₀)²`.
pub fn mse(estimates: &[f64], true_period: f64) -> Result<f64> {
    if estimates.is_empty() {
        return Err(invalid("mse of an empty list"));
    }
    Ok(estimates.iter().map(|p| (p - true_period).powi(2)).sum::<f64>() / estimates.len() as f64)
}

/// Fraction of estimates accepted by `spec`.
pub fn accuracy_rate(estimates: &[f64], spec: &AccuracySpec) -> Result<f64> {
    if estimates.is_empty() {
        return Err(invalid("accuracy of an empty list"));
    }
    let hits = estimates.iter().filter(|&&p| spec.accepts(p)).count();
    Ok(hits as f64 / estimates.len() as f64)
}
