//! Estimating the unknown period of an unevenly sampled, noisy time series.
//!
//! Three families of nonparametric estimators are provided, all driven by
//! the same trial-period scan:
//!
//! * periodograms ([`spectral`]): classical and Lomb-Scargle, maximized;
//! * phase-folding dispersion ([`dispersion`]): string length, Lafler-Kinman,
//!   Renson and PDM, minimized;
//! * smoothing fits ([`smoothing`]): periodic cubic spline and local linear
//!   SSE, supersmoother SAR, minimized.
//!
//! ```
//! use cyclefind::prelude::*;
//!
//! let model = SyntheticModel::new(Signal::sine(1.0), 1.0, 0.0)?;
//! let times = regular_times(300, 0.0, 1.0 / 12.0);
//! let series = generate(&model, &times, 0)?;
//! let grid = make_period_grid(0.5, 2.0, 0.005)?;
//! let est = estimate(&series, &grid, Method::LombScargle, &MethodConfig::default())?;
//! assert!((est.period - 1.0).abs() < 1e-9);
//! # Ok::<(), cyclefind::Error>(())
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dispersion;
mod error;
pub mod harness;
pub mod rng;
pub mod search;
pub mod series;
pub mod smoothing;
pub mod spectral;

pub use error::{Error, Result};

/// Crate version recorded in benchmark reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod prelude {
    pub use crate::dispersion::{PdmConfig, PhaseWrap, RensonConfig};
    pub use crate::search::{
        annotate_significance, bootstrap_ci, estimate, make_period_grid, scan, select_estimate,
        BootstrapConfig, Method, MethodConfig, ObjectiveCurve, PeriodEstimate, PeriodGrid,
    };
    pub use crate::series::{
        add_noise, fold_phase, fold_series, generate, regular_times, subsample, PhasedSeries,
        SamplingSpec, Signal, SyntheticModel, TimeSeries,
    };
    pub use crate::smoothing::{LocalLinearConfig, SplineConfig};
    pub use crate::{Error, Result};
}

// The guide's code blocks run as doctests so they cannot drift from the API.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/phase-folding.md")]
    mod phase_folding {}
    #[doc = include_str!("../../../book/src/periodograms.md")]
    mod periodograms {}
    #[doc = include_str!("../../../book/src/dispersion.md")]
    mod dispersion {}
    #[doc = include_str!("../../../book/src/smoothing.md")]
    mod smoothing {}
    #[doc = include_str!("../../../book/src/search.md")]
    mod search {}
    #[doc = include_str!("../../../book/src/benchmarks.md")]
    mod benchmarks {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
