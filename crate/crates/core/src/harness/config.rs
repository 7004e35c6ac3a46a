//! Key-value configuration file (TOML syntax).
//!
//! Every key is optional. Recognised keys:
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `grid` | trial periods `"pmin:pmax:step"` | `"0.5:2.0:0.005"` |
//! | `methods` | method names | all except `supersmoother-sar` |
//! | `seed` | master seed | `20200101` |
//! | `workers` | worker threads | `1` |
//! | `replicates` | Monte-Carlo replicates per condition | `100` |
//! | `proportions` | missing-data study proportions | `[0.2, ..., 0.7]` |
//! | `noise_multiples` | noise study sd multiples | `[0, 0.5, ..., 2.5]` |
//! | `noise_proportion` | subsample fraction in the noise study | `0.6` |
//! | `baseline_sd` | noise unit σ | `90.53` |
//! | `true_period`, `tolerance` | accuracy rule | `1.0`, `0.01` |
//! | `amplitude` | synthetic stand-in amplitude | see [`DEFAULT_STANDIN_AMPLITUDE`] |
//! | `center` | mean-centre before Lomb-Scargle | `true` |
//! | `wrap` | `"periodic"` or `"literal"` string-length closing gap | `"periodic"` |
//! | `renson_b` | Renson's b | `1/N` |
//! | `spline_knots` | K | `4` |
//! | `local_span`, `local_kernel` | local linear band and kernel | `0.3`, `"uniform"` |
//! | `supersmoother_spans` | three spans | `[0.05, 0.2, 0.5]` |
//! | `sar_scale` | `"series"`, `"residual-mad"` or `"unit"` | `"series"` |
//! | `pdm_bins`, `pdm_min_bin_count` | PDM bins | `10`, `2` |
//! | `bootstrap_replicates`, `alpha` | bootstrap B and interval level | `200`, `0.05` |
//! | `significance_alpha` | Lomb-Scargle significance level | `0.01` |
//! | `url_template`, `dataset_id` | remote data source | none |
//! | `detrend` | remove a linear trend after loading | `false` |
//!
//! The cache directory for remote data comes from `CYCLEFIND_CACHE_DIR`.
//!
//! [`DEFAULT_STANDIN_AMPLITUDE`]: crate::harness::study::DEFAULT_STANDIN_AMPLITUDE

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dispersion::{PdmConfig, PhaseWrap};
use crate::error::{Error, Result};
use crate::harness::metrics::AccuracySpec;
use crate::harness::study::{StudyConfig, DEFAULT_STANDIN_AMPLITUDE, SEA_LEVEL_SIGMA};
use crate::search::{BootstrapConfig, BootstrapMode, Method, MethodConfig, PeriodGrid, SarScale};
use crate::smoothing::{Kernel, LocalLinearConfig, SplineConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HarnessConfig {
    pub grid: String,
    pub methods: Vec<Method>,
    pub seed: u64,
    pub workers: usize,
    pub replicates: usize,
    pub proportions: Vec<f64>,
    pub noise_multiples: Vec<f64>,
    pub noise_proportion: f64,
    pub baseline_sd: f64,
    pub true_period: f64,
    pub tolerance: f64,
    pub amplitude: f64,
    pub center: bool,
    pub wrap: PhaseWrap,
    pub renson_b: Option<f64>,
    pub spline_knots: usize,
    pub local_span: f64,
    pub local_kernel: Kernel,
    pub supersmoother_spans: [f64; 3],
    pub sar_scale: SarScale,
    pub pdm_bins: usize,
    pub pdm_min_bin_count: usize,
    pub bootstrap_replicates: usize,
    pub alpha: f64,
    pub significance_alpha: f64,
    pub url_template: Option<String>,
    pub dataset_id: Option<String>,
    pub detrend: bool,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        let study = StudyConfig::sea_level(Vec::new());
        let method = MethodConfig::default();
        let boot = BootstrapConfig::default();
        Self {
            grid: "0.5:2.0:0.005".into(),
            methods: Method::ALL
                .into_iter()
                .filter(|&m| m != Method::SupersmootherSar)
                .collect(),
            seed: study.master_seed,
            workers: 1,
            replicates: study.replicates,
            proportions: study.proportions,
            noise_multiples: study.noise_multiples,
            noise_proportion: study.noise_proportion,
            baseline_sd: SEA_LEVEL_SIGMA,
            true_period: 1.0,
            tolerance: 0.01,
            amplitude: DEFAULT_STANDIN_AMPLITUDE,
            center: method.center,
            wrap: method.wrap,
            renson_b: None,
            spline_knots: method.spline.num_knots,
            local_span: method.local.span,
            local_kernel: method.local.kernel,
            supersmoother_spans: method.supersmoother_spans,
            sar_scale: method.sar_scale,
            pdm_bins: method.pdm.num_bins,
            pdm_min_bin_count: method.pdm.min_bin_count,
            bootstrap_replicates: boot.replicates,
            alpha: boot.alpha,
            significance_alpha: 0.01,
            url_template: None,
            dataset_id: None,
            detrend: false,
        }
    }
}

impl HarnessConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidArgument(format!("config: {e}")))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn period_grid(&self) -> Result<PeriodGrid> {
        PeriodGrid::parse(&self.grid)
    }

    pub fn method_config(&self) -> Result<MethodConfig> {
        Ok(MethodConfig {
            center: self.center,
            wrap: self.wrap,
            renson_b: self.renson_b,
            pdm: PdmConfig::new(self.pdm_bins, self.pdm_min_bin_count)?,
            spline: SplineConfig::new(self.spline_knots)?,
            local: LocalLinearConfig::new(self.local_span, self.local_kernel)?,
            supersmoother_spans: self.supersmoother_spans,
            sar_scale: self.sar_scale,
        })
    }

    pub fn study_config(&self) -> Result<StudyConfig> {
        Ok(StudyConfig {
            proportions: self.proportions.clone(),
            noise_multiples: self.noise_multiples.clone(),
            noise_proportion: self.noise_proportion,
            replicates: self.replicates,
            methods: self.methods.clone(),
            grid: self.period_grid()?,
            method_config: self.method_config()?,
            master_seed: self.seed,
            baseline_sd: self.baseline_sd,
            accuracy: AccuracySpec::new(self.true_period, self.tolerance)?,
        })
    }

    pub fn bootstrap_config(&self) -> BootstrapConfig {
        BootstrapConfig {
            replicates: self.bootstrap_replicates,
            alpha: self.alpha,
            mode: BootstrapMode::CaseResampling,
            seed: self.seed,
        }
    }
}
