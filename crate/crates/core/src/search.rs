//! Period search: trial grids, objective scans, estimate selection,
//! significance and bootstrap intervals.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dispersion::{
    pdm, string_length_lk, string_length_ren, string_length_sl, PdmConfig, PhaseWrap, RensonConfig,
};
use crate::error::{invalid, Error, Result};
use crate::rng;
use crate::series::{fold_series, TimeSeries};
use crate::smoothing::{
    fit_local_linear, fit_periodic_spline, series_noise_scale, supersmoother_sar, ErrorScale,
    LocalLinearConfig, SplineConfig, SupersmootherConfig,
};
use crate::spectral::{classical_power, lomb_scargle_power, ls_significance_threshold};

/// Arithmetic grid of trial periods. Serialized as its three parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridSpec", into = "GridSpec")]
pub struct PeriodGrid {
    pub p_min: f64,
    pub p_max: f64,
    pub step: f64,
    periods: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct GridSpec {
    p_min: f64,
    p_max: f64,
    step: f64,
}

impl TryFrom<GridSpec> for PeriodGrid {
    type Error = Error;

    fn try_from(g: GridSpec) -> Result<Self> {
        PeriodGrid::new(g.p_min, g.p_max, g.step)
    }
}

impl From<PeriodGrid> for GridSpec {
    fn from(g: PeriodGrid) -> Self {
        GridSpec {
            p_min: g.p_min,
            p_max: g.p_max,
            step: g.step,
        }
    }
}

/// `p_min, p_min + step, ...` up to `p_max` (inclusive, 1e-12 slack).
pub fn make_period_grid(p_min: f64, p_max: f64, step: f64) -> Result<PeriodGrid> {
    PeriodGrid::new(p_min, p_max, step)
}

impl PeriodGrid {
    pub fn new(p_min: f64, p_max: f64, step: f64) -> Result<Self> {
        if !(p_min > 0.0 && p_min.is_finite()) {
            return Err(invalid(format!("p_min must be positive, got {p_min}")));
        }
        if !(p_max >= p_min && p_max.is_finite()) {
            return Err(invalid(format!("p_max {p_max} is below p_min {p_min}")));
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(invalid(format!("step must be positive, got {step}")));
        }
        let count = ((p_max - p_min) / step + 1e-9).floor() as usize + 1;
        let periods = (0..count)
            .map(|i| p_min + i as f64 * step)
            .filter(|&p| p <= p_max + 1e-12)
            .collect();
        Ok(Self {
            p_min,
            p_max,
            step,
            periods,
        })
    }

    /// Parses `pmin:pmax:step`.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(invalid(format!("grid must be pmin:pmax:step, got {spec:?}")));
        }
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| invalid(format!("bad number {s:?} in grid {spec:?}")))
        };
        Self::new(num(parts[0])?, num(parts[1])?, num(parts[2])?)
    }

    pub fn periods(&self) -> &[f64] {
        &self.periods
    }

    pub fn len(&self) -> usize {
        self.periods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.periods.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Classical,
    LombScargle,
    Sl,
    Lk,
    Ren,
    Pdm,
    SplineSse,
    LocalSse,
    SupersmootherSar,
}

impl Method {
    pub const ALL: [Method; 9] = [
        Method::Classical,
        Method::LombScargle,
        Method::Sl,
        Method::Lk,
        Method::Ren,
        Method::Pdm,
        Method::SplineSse,
        Method::LocalSse,
        Method::SupersmootherSar,
    ];

    pub fn sense(self) -> Sense {
        match self {
            Method::Classical | Method::LombScargle => Sense::Maximize,
            _ => Sense::Minimize,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Classical => "classical",
            Method::LombScargle => "lomb-scargle",
            Method::Sl => "sl",
            Method::Lk => "lk",
            Method::Ren => "ren",
            Method::Pdm => "pdm",
            Method::SplineSse => "spline-sse",
            Method::LocalSse => "local-sse",
            Method::SupersmootherSar => "supersmoother-sar",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        let alias = match key.as_str() {
            "ls" => "lomb-scargle",
            "spline" => "spline-sse",
            "local" => "local-sse",
            "supersmoother" | "sar" => "supersmoother-sar",
            other => other,
        };
        Method::ALL
            .into_iter()
            .find(|m| m.name() == alias)
            .ok_or_else(|| invalid(format!("unknown method {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sense {
    Minimize,
    Maximize,
}

/// Where the supersmoother's residual scale comes from during a scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SarScale {
    /// One scale per series, from successive differences in time order.
    #[default]
    Series,
    /// Robust scale of each trial fit's own residuals.
    ResidualMad,
    Unit,
}

/// Tuning for every method; each method reads only its own fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MethodConfig {
    /// Subtract the mean before Lomb-Scargle.
    pub center: bool,
    pub wrap: PhaseWrap,
    /// Renson's `b`; `None` means `1/N`.
    pub renson_b: Option<f64>,
    pub pdm: PdmConfig,
    pub spline: SplineConfig,
    pub local: LocalLinearConfig,
    pub supersmoother_spans: [f64; 3],
    pub sar_scale: SarScale,
}

impl Default for MethodConfig {
    fn default() -> Self {
        Self {
            center: true,
            wrap: PhaseWrap::Periodic,
            renson_b: None,
            pdm: PdmConfig::default(),
            spline: SplineConfig::default(),
            local: LocalLinearConfig::default(),
            supersmoother_spans: SupersmootherConfig::default().spans,
            sar_scale: SarScale::Series,
        }
    }
}

impl MethodConfig {
    pub fn validate(&self, method: Method) -> Result<()> {
        match method {
            Method::Classical | Method::LombScargle | Method::Sl | Method::Lk => Ok(()),
            Method::Ren => self.renson_b.map_or(Ok(()), |b| RensonConfig::new(b).map(drop)),
            Method::Pdm => PdmConfig::new(self.pdm.num_bins, self.pdm.min_bin_count).map(drop),
            Method::SplineSse => SplineConfig::new(self.spline.num_knots).map(drop),
            Method::LocalSse => LocalLinearConfig::new(self.local.span, self.local.kernel).map(drop),
            Method::SupersmootherSar => SupersmootherConfig {
                spans: self.supersmoother_spans,
                scale: ErrorScale::Unit,
            }
            .validate(),
        }
    }
}

/// A method's statistic at every trial period; `None` marks an undefined
/// evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveCurve {
    pub method: Method,
    pub sense: Sense,
    pub periods: Vec<f64>,
    pub statistic: Vec<Option<f64>>,
}

impl ObjectiveCurve {
    pub fn new(method: Method, periods: Vec<f64>, statistic: Vec<Option<f64>>) -> Result<Self> {
        if periods.len() != statistic.len() {
            return Err(invalid("curve periods and statistics differ in length"));
        }
        Ok(Self {
            method,
            sense: method.sense(),
            periods,
            statistic,
        })
    }

    pub fn len(&self) -> usize {
        self.periods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.periods.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub low: f64,
    pub high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodEstimate {
    pub period: f64,
    pub statistic: f64,
    pub method: Method,
    pub significant: Option<bool>,
    pub ci: Option<Interval>,
}

/// A method bound to one series, with per-series quantities precomputed.
struct Objective<'a> {
    series: &'a TimeSeries,
    method: Method,
    cfg: MethodConfig,
    renson: RensonConfig,
    sar: SupersmootherConfig,
}

impl<'a> Objective<'a> {
    fn new(series: &'a TimeSeries, method: Method, cfg: &MethodConfig) -> Result<Self> {
        cfg.validate(method)?;
        let mut renson = match cfg.renson_b {
            Some(b) => RensonConfig::new(b)?,
            None => RensonConfig::for_len(series.len()),
        };
        renson.wrap = cfg.wrap;
        let scale = match cfg.sar_scale {
            SarScale::Series => series_noise_scale(series).map_or(ErrorScale::Unit, ErrorScale::Fixed),
            SarScale::ResidualMad => ErrorScale::ResidualMad,
            SarScale::Unit => ErrorScale::Unit,
        };
        Ok(Self {
            series,
            method,
            cfg: *cfg,
            renson,
            sar: SupersmootherConfig {
                spans: cfg.supersmoother_spans,
                scale,
            },
        })
    }

    fn eval(&self, period: f64) -> Result<Option<f64>> {
        let value = match self.method {
            Method::Classical => return Ok(Some(classical_power(self.series, 1.0 / period))),
            Method::LombScargle => {
                if self.series.len() < 3 {
                    return Err(Error::InsufficientData(
                        "Lomb-Scargle needs at least 3 observations".into(),
                    ));
                }
                return Ok(lomb_scargle_power(self.series, 1.0 / period, self.cfg.center));
            }
            _ => {
                let ps = fold_series(self.series, period)?;
                match self.method {
                    Method::Sl => string_length_sl(&ps, self.cfg.wrap),
                    Method::Lk => string_length_lk(&ps),
                    Method::Ren => string_length_ren(&ps, &self.renson),
                    Method::Pdm => pdm(&ps, &self.cfg.pdm),
                    Method::SplineSse => fit_periodic_spline(&ps, &self.cfg.spline).map(|f| f.sse),
                    Method::LocalSse => fit_local_linear(&ps, &self.cfg.local).map(|f| f.sse),
                    Method::SupersmootherSar => supersmoother_sar(&ps, &self.sar).map(|f| f.sar),
                    Method::Classical | Method::LombScargle => unreachable!(),
                }
            }
        };
        match value {
            Ok(v) if v.is_finite() => Ok(Some(v)),
            Ok(_) => Ok(None),
            Err(e) if e.is_numerical() => Ok(None),
            Err(e) => Err(e),
        }
    }
}

/// Runs `f(0..n)` on `workers` threads; output is in index order.
pub(crate) fn run_indexed<T, F>(workers: usize, n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    if workers <= 1 || n <= 1 {
        return (0..n).map(f).collect();
    }
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| invalid(format!("thread pool: {e}")))?;
    pool.install(|| (0..n).into_par_iter().map(f).collect())
}

/// Evaluates `method` at every grid period. Periodograms use `f = 1/p`.
pub fn scan(
    series: &TimeSeries,
    grid: &PeriodGrid,
    method: Method,
    cfg: &MethodConfig,
) -> Result<ObjectiveCurve> {
    scan_with_workers(series, grid, method, cfg, 1)
}

pub fn scan_with_workers(
    series: &TimeSeries,
    grid: &PeriodGrid,
    method: Method,
    cfg: &MethodConfig,
    workers: usize,
) -> Result<ObjectiveCurve> {
    let objective = Objective::new(series, method, cfg)?;
    let periods = grid.periods();
    let statistic = run_indexed(workers, periods.len(), |i| objective.eval(periods[i]))?;
    ObjectiveCurve::new(method, periods.to_vec(), statistic)
}

/// Global optimum among defined entries; ties go to the smaller period.
pub fn select_estimate(curve: &ObjectiveCurve) -> Result<PeriodEstimate> {
    let better = |a: f64, b: f64| match curve.sense {
        Sense::Minimize => a < b,
        Sense::Maximize => a > b,
    };
    let mut best: Option<(f64, f64)> = None;
    for (&p, s) in curve.periods.iter().zip(&curve.statistic) {
        let Some(s) = *s else { continue };
        best = match best {
            None => Some((p, s)),
            Some((bp, bs)) if better(s, bs) || (s == bs && p < bp) => Some((p, s)),
            keep => keep,
        };
    }
    let (period, statistic) = best.ok_or_else(|| {
        Error::InsufficientData(format!("{} curve has no defined values", curve.method))
    })?;
    Ok(PeriodEstimate {
        period,
        statistic,
        method: curve.method,
        significant: None,
        ci: None,
    })
}

/// Scan then select.
pub fn estimate(
    series: &TimeSeries,
    grid: &PeriodGrid,
    method: Method,
    cfg: &MethodConfig,
) -> Result<PeriodEstimate> {
    select_estimate(&scan(series, grid, method, cfg)?)
}

/// Marks a Lomb-Scargle estimate significant when its power exceeds the
/// single-frequency χ²₂ level for `alpha`.
pub fn annotate_significance(
    est: &PeriodEstimate,
    curve: &ObjectiveCurve,
    alpha: f64,
    noise_variance: f64,
) -> Result<PeriodEstimate> {
    if curve.method != Method::LombScargle || est.method != Method::LombScargle {
        return Err(invalid("significance is only defined for Lomb-Scargle curves"));
    }
    let threshold = ls_significance_threshold(alpha, noise_variance)?;
    Ok(PeriodEstimate {
        significant: Some(est.statistic > threshold),
        ..est.clone()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BootstrapMode {
    #[default]
    CaseResampling,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub replicates: usize,
    pub alpha: f64,
    #[serde(default)]
    pub mode: BootstrapMode,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            replicates: 200,
            alpha: 0.05,
            mode: BootstrapMode::CaseResampling,
            seed: 0,
        }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicates < 1 {
            return Err(invalid("bootstrap needs at least one replicate"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(invalid(format!("alpha must be in (0, 1), got {}", self.alpha)));
        }
        Ok(())
    }
}

/// Linear-interpolation quantile of sorted data.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Empirical `(alpha/2, 1 - alpha/2)` percentile interval.
pub fn percentile_interval(estimates: &[f64], alpha: f64) -> Result<Interval> {
    if estimates.is_empty() {
        return Err(invalid("no estimates"));
    }
    let mut sorted = estimates.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(Interval {
        low: quantile_sorted(&sorted, alpha / 2.0),
        high: quantile_sorted(&sorted, 1.0 - alpha / 2.0),
    })
}

const MAX_REDRAWS: usize = 10;

/// One case-resampled copy of `series`, re-sorted by time.
fn resample(series: &TimeSeries, seed: u64, replicate: usize) -> Result<TimeSeries> {
    let n = series.len();
    for attempt in 0..=MAX_REDRAWS {
        let mut rng = rng::stream(rng::derive_seed(
            seed,
            &[rng::tag::BOOTSTRAP, replicate as u64, attempt as u64],
        ));
        let mut idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        // Times are sorted, so sorting indices sorts by time.
        idx.sort_unstable();
        let mut distinct = 1;
        for w in idx.windows(2) {
            if series.times()[w[1]] != series.times()[w[0]] {
                distinct += 1;
            }
        }
        if distinct >= 3 {
            return TimeSeries::with_label(
                idx.iter().map(|&i| series.times()[i]).collect(),
                idx.iter().map(|&i| series.values()[i]).collect(),
                series.label(),
            );
        }
    }
    Err(Error::InsufficientData(format!(
        "bootstrap replicate {replicate} degenerate after {MAX_REDRAWS} redraws"
    )))
}

/// Point estimate on the full series plus a case-resampling bootstrap
/// percentile interval. Replicate `b` draws from a stream derived from
/// `(seed, b)`, so `workers` never changes the result.
pub fn bootstrap_ci(
    series: &TimeSeries,
    grid: &PeriodGrid,
    method: Method,
    cfg: &MethodConfig,
    boot: &BootstrapConfig,
    workers: usize,
) -> Result<PeriodEstimate> {
    boot.validate()?;
    cfg.validate(method)?;
    if series.len() < 10 {
        return Err(Error::InsufficientData(
            "bootstrap needs at least 10 observations".into(),
        ));
    }
    let point = estimate(series, grid, method, cfg)?;
    let estimates = run_indexed(workers, boot.replicates, |b| {
        let sample = resample(series, boot.seed, b)?;
        estimate(&sample, grid, method, cfg).map(|e| e.period)
    })?;
    let ci = percentile_interval(&estimates, boot.alpha)?;
    Ok(PeriodEstimate {
        ci: Some(Interval {
            low: ci.low.min(point.period),
            high: ci.high.max(point.period),
        }),
        ..point
    })
}
