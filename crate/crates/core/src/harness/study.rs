//! Monte-Carlo comparison studies.
//!
//! A study takes one base series and, for every condition and replicate,
//! perturbs it (random subsampling, optionally extra white noise) and runs
//! every configured method on the result. Each `(condition, replicate)` work
//! unit draws from streams keyed by the master seed, the condition value and
//! the replicate index:
//!
//! * subsample seed: `derive_seed(master, [SUBSAMPLE, proportion bits, r])`
//! * noise seed: `derive_seed(master, [NOISE, sd-multiple bits, r])`
//!
//! so reports do not depend on the worker count, and the noise study at
//! multiple 0 reproduces the missing-data study at the same proportion.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::harness::metrics::{accuracy_rate, mse, AccuracySpec};
use crate::rng::{self, tag};
use crate::search::{estimate, run_indexed, Method, MethodConfig, PeriodGrid};
use crate::series::{add_noise, generate, regular_times, subsample, SamplingSpec, Signal, SyntheticModel, TimeSeries};

pub const SCHEMA_VERSION: u32 = 1;

/// Amplitude of the synthetic stand-in's annual cycle, from a pilot run
/// (see the benchmark chapter of the guide).
pub const DEFAULT_STANDIN_AMPLITUDE: f64 = 110.0;

/// Residual noise sd of the monthly sea-level record used as the noise unit.
pub const SEA_LEVEL_SIGMA: f64 = 90.53;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    /// Missing-data study: fractions of the base series kept.
    #[serde(default)]
    pub proportions: Vec<f64>,
    /// Noise study: added noise sd as multiples of `baseline_sd`.
    #[serde(default)]
    pub noise_multiples: Vec<f64>,
    /// Fraction kept before adding noise in the noise study.
    pub noise_proportion: f64,
    pub replicates: usize,
    pub methods: Vec<Method>,
    pub grid: PeriodGrid,
    pub method_config: MethodConfig,
    pub master_seed: u64,
    pub baseline_sd: f64,
    pub accuracy: AccuracySpec,
}

impl StudyConfig {
    /// The sea-level protocol defaults: proportions 0.2..0.7, sd multiples
    /// 0..2.5, 100 replicates, periods 0.5..2.0 step 0.005, tolerance 0.01.
    pub fn sea_level(methods: Vec<Method>) -> Self {
        Self {
            proportions: vec![0.2, 0.3, 0.4, 0.5, 0.6, 0.7],
            noise_multiples: vec![0.0, 0.5, 1.0, 1.5, 2.0, 2.5],
            noise_proportion: 0.6,
            replicates: 100,
            methods,
            grid: PeriodGrid::new(0.5, 2.0, 0.005).expect("static grid"),
            method_config: MethodConfig::default(),
            master_seed: 20_200_101,
            baseline_sd: SEA_LEVEL_SIGMA,
            accuracy: AccuracySpec::from_phase_offset(1.0, 25.0, 0.25).expect("static spec"),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.replicates < 1 {
            return Err(invalid("a study needs at least one replicate"));
        }
        if self.methods.is_empty() {
            return Err(invalid("no methods configured"));
        }
        for &m in &self.methods {
            self.method_config.validate(m)?;
        }
        if !(self.baseline_sd >= 0.0) {
            return Err(invalid("baseline sd must be >= 0"));
        }
        AccuracySpec::new(self.accuracy.true_period, self.accuracy.tolerance)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StudyKind {
    MissingData,
    Noise,
}

/// One column of a results table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub proportion: f64,
    /// Added noise sd in units of the baseline sd.
    pub noise_multiple: Option<f64>,
    /// `1 + m²`: total noise variance in units of the baseline variance.
    pub total_variance_multiple: Option<f64>,
}

impl Condition {
    pub fn label(&self) -> String {
        match self.total_variance_multiple {
            Some(v) => format!("{v}sigma^2"),
            None => format!("{}%", self.proportion * 100.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchCell {
    pub method: Method,
    pub condition: Condition,
    pub mse: f64,
    pub accuracy_rate: f64,
    /// One estimate per replicate, in replicate order.
    pub estimates: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub schema_version: u32,
    pub software_version: String,
    pub study: StudyKind,
    pub config: StudyConfig,
    pub cells: Vec<BenchCell>,
}

impl BenchReport {
    pub fn cell(&self, method: Method, condition_value: f64) -> Option<&BenchCell> {
        self.cells.iter().find(|c| {
            c.method == method
                && match self.study {
                    StudyKind::MissingData => c.condition.proportion == condition_value,
                    StudyKind::Noise => c.condition.noise_multiple == Some(condition_value),
                }
        })
    }

    /// Recomputes every summary from the stored estimates; true if all match.
    pub fn summaries_consistent(&self) -> bool {
        self.cells.iter().all(|c| {
            c.estimates.len() == self.config.replicates
                && mse(&c.estimates, self.config.accuracy.true_period).ok() == Some(c.mse)
                && accuracy_rate(&c.estimates, &self.config.accuracy).ok() == Some(c.accuracy_rate)
        })
    }
}

/// Estimates every method on one perturbed copy of the base series.
fn replicate(
    base: &TimeSeries,
    cfg: &StudyConfig,
    proportion: f64,
    noise_multiple: f64,
    r: usize,
) -> Result<Vec<f64>> {
    let sub_seed = rng::derive_seed(cfg.master_seed, &[tag::SUBSAMPLE, proportion.to_bits(), r as u64]);
    let mut sample = subsample(base, &SamplingSpec::new(proportion, sub_seed)?)?;
    let sd = noise_multiple * cfg.baseline_sd;
    if sd > 0.0 {
        let noise_seed = rng::derive_seed(cfg.master_seed, &[tag::NOISE, noise_multiple.to_bits(), r as u64]);
        sample = add_noise(&sample, sd, noise_seed)?;
    }
    cfg.methods
        .iter()
        .map(|&m| estimate(&sample, &cfg.grid, m, &cfg.method_config).map(|e| e.period))
        .collect()
}

fn run_study(
    base: &TimeSeries,
    cfg: &StudyConfig,
    kind: StudyKind,
    conditions: Vec<Condition>,
    workers: usize,
) -> Result<BenchReport> {
    cfg.validate()?;
    if conditions.is_empty() {
        return Err(invalid("no study conditions configured"));
    }
    for c in &conditions {
        if SamplingSpec::new(c.proportion, 0)?.count(base.len()) < 2 {
            return Err(invalid(format!(
                "proportion {} keeps fewer than 2 of {} points",
                c.proportion,
                base.len()
            )));
        }
        if let Some(m) = c.noise_multiple {
            if !(m >= 0.0) {
                return Err(invalid("noise multiples must be >= 0"));
            }
        }
    }
    let r_count = cfg.replicates;
    let units = run_indexed(workers, conditions.len() * r_count, |u| {
        let c = &conditions[u / r_count];
        replicate(base, cfg, c.proportion, c.noise_multiple.unwrap_or(0.0), u % r_count)
    })?;

    let mut cells = Vec::with_capacity(conditions.len() * cfg.methods.len());
    for (ci, condition) in conditions.iter().enumerate() {
        for (mi, &method) in cfg.methods.iter().enumerate() {
            let estimates: Vec<f64> = (0..r_count).map(|r| units[ci * r_count + r][mi]).collect();
            cells.push(BenchCell {
                method,
                condition: *condition,
                mse: mse(&estimates, cfg.accuracy.true_period)?,
                accuracy_rate: accuracy_rate(&estimates, &cfg.accuracy)?,
                estimates,
            });
        }
    }
    Ok(BenchReport {
        schema_version: SCHEMA_VERSION,
        software_version: crate::VERSION.to_string(),
        study: kind,
        config: cfg.clone(),
        cells,
    })
}

/// Subsamples the base series at each configured proportion.
pub fn run_missing_data_study(base: &TimeSeries, cfg: &StudyConfig, workers: usize) -> Result<BenchReport> {
    let conditions = cfg
        .proportions
        .iter()
        .map(|&proportion| Condition {
            proportion,
            noise_multiple: None,
            total_variance_multiple: None,
        })
        .collect();
    run_study(base, cfg, StudyKind::MissingData, conditions, workers)
}

/// Subsamples at `noise_proportion`, then adds noise of sd `m · baseline_sd`
/// for each configured multiple `m`.
pub fn run_noise_study(base: &TimeSeries, cfg: &StudyConfig, workers: usize) -> Result<BenchReport> {
    if cfg.noise_multiples.is_empty() {
        return Err(invalid("no noise multiples configured"));
    }
    let conditions = cfg
        .noise_multiples
        .iter()
        .map(|&m| Condition {
            proportion: cfg.noise_proportion,
            noise_multiple: Some(m),
            total_variance_multiple: Some(1.0 + m * m),
        })
        .collect();
    run_study(base, cfg, StudyKind::Noise, conditions, workers)
}

/// Stand-in for the monthly sea-level record: 300 monthly samples
/// (`t = n/12`, `n = 1..=300`), an annual sinusoid of the given amplitude
/// and white noise of sd `sigma`.
pub fn sea_level_standin(amplitude: f64, sigma: f64, seed: u64) -> Result<TimeSeries> {
    let model = SyntheticModel::new(Signal::sine(amplitude), 1.0, sigma)?;
    let times = regular_times(300, 1.0 / 12.0, 1.0 / 12.0);
    let s = generate(&model, &times, rng::derive_seed(seed, &[tag::BASE]))?;
    TimeSeries::with_label(s.times().to_vec(), s.values().to_vec(), "sea-level stand-in")
}
