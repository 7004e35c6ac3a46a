//! Dispersion statistics on phase-folded data: the string-length family
//! (plain, Lafler-Kinman, Renson) and phase dispersion minimization.
//!
//! All of them are small when the folded light curve is tidy, i.e. when
//! consecutive points in phase order also have similar values.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::series::PhasedSeries;

/// How the closing segment from the last phase back to the first is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseWrap {
    /// Gap `ρ₁ + 1 − ρ_N`: distance on the phase circle.
    #[default]
    Periodic,
    /// Gap `ρ₁ − ρ_N`, taking `ρ_{N+1} = ρ₁` at face value.
    Literal,
}

/// Iterates `(Δy, Δρ)` over consecutive sorted points, closing the loop.
fn cyclic_steps(ps: &PhasedSeries, wrap: PhaseWrap) -> impl Iterator<Item = (f64, f64)> + '_ {
    let n = ps.len();
    let (rho, y) = (ps.phases(), ps.values());
    (0..n).map(move |i| {
        let j = (i + 1) % n;
        let mut dr = rho[j] - rho[i];
        if j == 0 && wrap == PhaseWrap::Periodic {
            dr += 1.0;
        }
        (y[j] - y[i], dr)
    })
}

fn check(ps: &PhasedSeries) -> Result<()> {
    ps.require_sorted()?;
    if ps.len() < 2 {
        return Err(Error::InsufficientData(
            "string length needs at least 2 points".into(),
        ));
    }
    Ok(())
}

/// `Σ (Δy)² + (Δρ)²` around the phase circle.
pub fn string_length_sl(ps: &PhasedSeries, wrap: PhaseWrap) -> Result<f64> {
    check(ps)?;
    Ok(cyclic_steps(ps, wrap).map(|(dy, dr)| dy * dy + dr * dr).sum())
}

/// Lafler-Kinman: `Σ (Δy)²` around the phase circle.
pub fn string_length_lk(ps: &PhasedSeries) -> Result<f64> {
    check(ps)?;
    Ok(cyclic_steps(ps, PhaseWrap::Periodic)
        .map(|(dy, _)| dy * dy)
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RensonConfig {
    /// Keeps the phase-gap denominator away from zero.
    pub b: f64,
    pub wrap: PhaseWrap,
}

impl RensonConfig {
    pub fn new(b: f64) -> Result<Self> {
        if !(b > 0.0) || !b.is_finite() {
            return Err(invalid(format!("Renson b must be positive, got {b}")));
        }
        Ok(Self {
            b,
            wrap: PhaseWrap::Periodic,
        })
    }

    /// `b = 1/N`, the mean phase spacing.
    pub fn for_len(n: usize) -> Self {
        Self {
            b: 1.0 / n.max(1) as f64,
            wrap: PhaseWrap::Periodic,
        }
    }
}

/// Renson: `Σ (Δy)² / ((Δρ)² + b²)`.
pub fn string_length_ren(ps: &PhasedSeries, cfg: &RensonConfig) -> Result<f64> {
    check(ps)?;
    let cfg = RensonConfig {
        wrap: cfg.wrap,
        ..RensonConfig::new(cfg.b)?
    };
    let b2 = cfg.b * cfg.b;
    Ok(cyclic_steps(ps, cfg.wrap)
        .map(|(dy, dr)| dy * dy / (dr * dr + b2))
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PdmConfig {
    pub num_bins: usize,
    pub min_bin_count: usize,
}

impl Default for PdmConfig {
    fn default() -> Self {
        Self {
            num_bins: 10,
            min_bin_count: 2,
        }
    }
}

impl PdmConfig {
    pub fn new(num_bins: usize, min_bin_count: usize) -> Result<Self> {
        if num_bins < 2 {
            return Err(invalid("PDM needs at least 2 bins"));
        }
        if min_bin_count < 2 {
            return Err(invalid("PDM min_bin_count must be at least 2"));
        }
        Ok(Self {
            num_bins,
            min_bin_count,
        })
    }
}

/// Size and sample variance of one group of observations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinStat {
    pub count: usize,
    /// Sample variance with `count - 1` in the denominator; 0 when `count < 2`.
    pub variance: f64,
}

impl BinStat {
    pub fn from_values(values: &[f64]) -> Self {
        let count = values.len();
        if count < 2 {
            return Self { count, variance: 0.0 };
        }
        let mean = values.iter().sum::<f64>() / count as f64;
        let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
        Self {
            count,
            variance: ss / (count - 1) as f64,
        }
    }
}

/// Per-bin breakdown behind one PDM value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdmBins {
    pub bins: Vec<BinStat>,
    pub pooled: f64,
    /// Population variance of all values.
    pub total: f64,
}

impl PdmBins {
    pub fn statistic(&self) -> f64 {
        self.pooled / self.total
    }
}

/// `Σ (n_m − 1) s_m² / (Σ n_m − M_eff)` over bins with at least
/// `min_count` members; `M_eff` is how many bins qualified.
pub fn pooled_variance(bins: &[BinStat], min_count: usize) -> Result<f64> {
    let min_count = min_count.max(2);
    let (mut num, mut total, mut used) = (0.0, 0usize, 0usize);
    for bin in bins.iter().filter(|b| b.count >= min_count) {
        num += (bin.count - 1) as f64 * bin.variance;
        total += bin.count;
        used += 1;
    }
    if used == 0 {
        return Err(Error::InsufficientData(format!(
            "no bin has at least {min_count} observations"
        )));
    }
    Ok(num / (total - used) as f64)
}

/// Bin index for a phase in `[0, 1)`.
fn bin_of(phase: f64, num_bins: usize) -> usize {
    ((phase * num_bins as f64) as usize).min(num_bins - 1)
}

/// Bins the folded data into `num_bins` equal phase intervals and returns
/// the pooled and total variances.
pub fn pdm_bins(ps: &PhasedSeries, cfg: &PdmConfig) -> Result<PdmBins> {
    let cfg = PdmConfig::new(cfg.num_bins, cfg.min_bin_count)?;
    let values = ps.values();
    if values.is_empty() {
        return Err(Error::InsufficientData("no observations".into()));
    }
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if lo == hi {
        return Err(Error::DegenerateInput(
            "constant series has zero variance".into(),
        ));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let total = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;

    let mut groups: Vec<Vec<f64>> = vec![Vec::new(); cfg.num_bins];
    for (&rho, &y) in ps.phases().iter().zip(values) {
        groups[bin_of(rho, cfg.num_bins)].push(y);
    }
    let bins: Vec<BinStat> = groups.iter().map(|g| BinStat::from_values(g)).collect();
    let pooled = pooled_variance(&bins, cfg.min_bin_count)?;
    Ok(PdmBins {
        bins,
        pooled,
        total,
    })
}

/// Phase dispersion minimization statistic `s² / σ²`.
pub fn pdm(ps: &PhasedSeries, cfg: &PdmConfig) -> Result<f64> {
    pdm_bins(ps, cfg).map(|b| b.statistic())
}
