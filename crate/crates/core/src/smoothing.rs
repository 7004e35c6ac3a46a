//! Smoothers fitted to phase-folded data.
//!
//! Each smoother produces fitted values on the phase circle; the residual
//! sum (squared for the spline and local linear fits, absolute and scaled
//! for the supersmoother) is the objective a period scan minimizes.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::series::{fold_series, PhasedSeries, TimeSeries};

// ---------------------------------------------------------------------------
// Periodic cubic spline
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KnotPlacement {
    #[default]
    EquallySpaced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplineConfig {
    /// Four knots hold one cycle but not two, so a fold at twice the true
    /// period fits worse than the fold at the true period.
    pub num_knots: usize,
    #[serde(default)]
    pub placement: KnotPlacement,
}

impl Default for SplineConfig {
    fn default() -> Self {
        Self {
            num_knots: 4,
            placement: KnotPlacement::EquallySpaced,
        }
    }
}

impl SplineConfig {
    pub fn new(num_knots: usize) -> Result<Self> {
        if num_knots < 4 {
            return Err(invalid(format!(
                "a periodic cubic spline needs at least 4 knots, got {num_knots}"
            )));
        }
        Ok(Self {
            num_knots,
            placement: KnotPlacement::EquallySpaced,
        })
    }
}

/// Knot interval and local coordinate of `x` in `[0, 1]`.
fn locate(x: f64, k: usize) -> (usize, f64) {
    let scaled = x * k as f64;
    let j = (scaled.floor() as usize).min(k - 1);
    (j, scaled - j as f64)
}

/// The four cubic B-spline weights on one knot interval and their first
/// two derivatives in the local coordinate `u`. Entry `i` belongs to basis
/// function `j - 3 + i`.
fn bspline_weights(u: f64, order: usize) -> [f64; 4] {
    let v = 1.0 - u;
    match order {
        0 => [
            v * v * v / 6.0,
            (3.0 * u * u * u - 6.0 * u * u + 4.0) / 6.0,
            (-3.0 * u * u * u + 3.0 * u * u + 3.0 * u + 1.0) / 6.0,
            u * u * u / 6.0,
        ],
        1 => [
            -v * v / 2.0,
            (3.0 * u * u - 4.0 * u) / 2.0,
            (-3.0 * u * u + 2.0 * u + 1.0) / 2.0,
            u * u / 2.0,
        ],
        2 => [v, 3.0 * u - 2.0, 1.0 - 3.0 * u, u],
        3 => [-1.0, 3.0, -3.0, 1.0],
        _ => [0.0; 4],
    }
}

fn basis_index(j: usize, i: usize, k: usize) -> usize {
    (j + k + i - 3) % k
}

/// Least-squares periodic cubic spline on folded data.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSplineFit {
    pub coefficients: Vec<f64>,
    /// Fitted values in the input point order.
    pub fitted: Vec<f64>,
    pub sse: f64,
    /// Whether the ridge fallback was needed.
    pub regularized: bool,
}

impl PeriodicSplineFit {
    /// `order`-th derivative with respect to phase at `x ∈ [0, 1]`. At
    /// `x = 1` the last knot interval is evaluated at its right end.
    pub fn derivative(&self, x: f64, order: usize) -> f64 {
        let k = self.coefficients.len();
        let (j, u) = locate(x, k);
        let w = bspline_weights(u, order);
        let scale = (k as f64).powi(order as i32);
        scale
            * (0..4)
                .map(|i| w[i] * self.coefficients[basis_index(j, i, k)])
                .sum::<f64>()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.derivative(x, 0)
    }
}

/// Value of a single basis function at `x`, for building test data.
pub fn periodic_basis(index: usize, num_knots: usize, x: f64) -> f64 {
    let (j, u) = locate(x, num_knots);
    let w = bspline_weights(u, 0);
    (0..4)
        .filter(|&i| basis_index(j, i, num_knots) == index)
        .map(|i| w[i])
        .sum()
}

/// Fits a periodic cubic spline with equally spaced knots by least squares.
///
/// Solved through the normal equations with a Cholesky factorization. If
/// the data leave some knot interval empty, or the factorization fails, a
/// ridge of `1e-10 · trace / K` is added to the diagonal.
pub fn fit_periodic_spline(ps: &PhasedSeries, cfg: &SplineConfig) -> Result<PeriodicSplineFit> {
    let k = SplineConfig::new(cfg.num_knots)?.num_knots;
    let n = ps.len();
    if n < k + 1 {
        return Err(Error::DegenerateFit(format!(
            "{n} points cannot determine a {k}-knot spline"
        )));
    }
    let mut gram = DMatrix::<f64>::zeros(k, k);
    let mut rhs = DVector::<f64>::zeros(k);
    let mut covered = vec![false; k];
    for (&x, &y) in ps.phases().iter().zip(ps.values()) {
        let (j, u) = locate(x, k);
        covered[j] = true;
        let w = bspline_weights(u, 0);
        for a in 0..4 {
            let ia = basis_index(j, a, k);
            rhs[ia] += w[a] * y;
            for b in 0..4 {
                gram[(ia, basis_index(j, b, k))] += w[a] * w[b];
            }
        }
    }

    let full_rank = covered.iter().all(|&c| c);
    let plain = if full_rank {
        gram.clone().cholesky()
    } else {
        None
    };
    let (chol, regularized) = match plain {
        Some(c) => (c, false),
        None => {
            let ridge = 1e-10 * gram.trace() / k as f64;
            let mut g = gram;
            for i in 0..k {
                g[(i, i)] += ridge;
            }
            match g.cholesky() {
                Some(c) if ridge > 0.0 => (c, true),
                _ => {
                    return Err(Error::DegenerateFit(
                        "spline normal equations are singular".into(),
                    ))
                }
            }
        }
    };
    let coefficients = chol.solve(&rhs);

    let mut fit = PeriodicSplineFit {
        coefficients: coefficients.iter().copied().collect(),
        fitted: Vec::with_capacity(n),
        sse: 0.0,
        regularized,
    };
    let mut sse = 0.0;
    for (&x, &y) in ps.phases().iter().zip(ps.values()) {
        let yhat = fit.eval(x);
        sse += (y - yhat).powi(2);
        fit.fitted.push(yhat);
    }
    fit.sse = sse;
    Ok(fit)
}

// ---------------------------------------------------------------------------
// Local linear regression
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kernel {
    #[default]
    Uniform,
    Tricube,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalLinearConfig {
    /// Fraction of the points in each band.
    pub span: f64,
    #[serde(default)]
    pub kernel: Kernel,
}

impl Default for LocalLinearConfig {
    fn default() -> Self {
        Self {
            span: 0.3,
            kernel: Kernel::Uniform,
        }
    }
}

impl LocalLinearConfig {
    pub fn new(span: f64, kernel: Kernel) -> Result<Self> {
        if !(span > 0.0 && span <= 1.0) {
            return Err(invalid(format!("span must be in (0, 1], got {span}")));
        }
        Ok(Self { span, kernel })
    }

    fn band_size(&self, n: usize) -> usize {
        ((self.span * n as f64 - 1e-9).ceil() as usize).min(n)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalLinearFit {
    /// Per-point intercept of the local line, in the band's phase coordinates.
    pub intercepts: Vec<f64>,
    pub slopes: Vec<f64>,
    pub fitted: Vec<f64>,
    /// Diagonal of the smoother matrix.
    pub leverage: Vec<f64>,
    pub sse: f64,
}

/// Phases and values with copies shifted by −1 and +1, so contiguous
/// windows see circular neighbours.
struct Circular {
    x: Vec<f64>,
    y: Vec<f64>,
    n: usize,
}

impl Circular {
    fn new(phases: &[f64], values: &[f64]) -> Self {
        let n = phases.len();
        let mut x = Vec::with_capacity(3 * n);
        let mut y = Vec::with_capacity(3 * n);
        for shift in [-1.0, 0.0, 1.0] {
            x.extend(phases.iter().map(|p| p + shift));
            y.extend_from_slice(values);
        }
        Self { x, y, n }
    }
}

/// Weighted least-squares line through one band, evaluated at `target`.
/// Returns (intercept, slope, fitted, leverage of the target point).
fn local_line(x: &[f64], y: &[f64], target: f64, kernel: Kernel) -> (f64, f64, f64, f64) {
    let max_d = x.iter().map(|xi| (xi - target).abs()).fold(0.0, f64::max);
    let weight = |xi: f64| -> f64 {
        match kernel {
            Kernel::Uniform => 1.0,
            Kernel::Tricube => {
                if max_d <= 0.0 {
                    1.0
                } else {
                    let r = (xi - target).abs() / (max_d * 1.001);
                    (1.0 - r * r * r).powi(3)
                }
            }
        }
    };
    let (mut sw, mut swx, mut swy) = (0.0, 0.0, 0.0);
    for (&xi, &yi) in x.iter().zip(y) {
        let w = weight(xi);
        sw += w;
        swx += w * xi;
        swy += w * yi;
    }
    let (xm, ym) = (swx / sw, swy / sw);
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (&xi, &yi) in x.iter().zip(y) {
        let w = weight(xi);
        sxx += w * (xi - xm) * (xi - xm);
        sxy += w * (xi - xm) * (yi - ym);
    }
    let w0 = weight(target);
    // A band with (numerically) a single phase supports only a constant.
    if sxx <= 1e-14 * sw {
        return (ym, 0.0, ym, w0 / sw);
    }
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let fitted = intercept + slope * target;
    let leverage = w0 / sw + w0 * (target - xm).powi(2) / sxx;
    (intercept, slope, fitted, leverage)
}

/// Local linear smooth of sorted phased data with circular bands of
/// `ceil(span · N)` nearest neighbours. A band covering every point uses the
/// points once each at their own phases.
pub fn fit_local_linear(ps: &PhasedSeries, cfg: &LocalLinearConfig) -> Result<LocalLinearFit> {
    ps.require_sorted()?;
    let cfg = LocalLinearConfig::new(cfg.span, cfg.kernel)?;
    local_linear_raw(ps.phases(), ps.values(), &cfg)
}

fn local_linear_raw(phases: &[f64], values: &[f64], cfg: &LocalLinearConfig) -> Result<LocalLinearFit> {
    let n = phases.len();
    let k = cfg.band_size(n);
    if k < 3 {
        return Err(Error::DegenerateFit(format!(
            "band of {k} points (span {} of {n}) is too small for a line",
            cfg.span
        )));
    }
    let mut fit = LocalLinearFit {
        intercepts: Vec::with_capacity(n),
        slopes: Vec::with_capacity(n),
        fitted: Vec::with_capacity(n),
        leverage: Vec::with_capacity(n),
        sse: 0.0,
    };
    if k == n {
        for &target in phases {
            let (a, b, f, h) = local_line(phases, values, target, cfg.kernel);
            fit.intercepts.push(a);
            fit.slopes.push(b);
            fit.fitted.push(f);
            fit.leverage.push(h);
        }
    } else {
        let circ = Circular::new(phases, values);
        let mut start = circ.n + 1 - k;
        for i in 0..n {
            let centre = circ.n + i;
            let target = circ.x[centre];
            start = start.max(centre + 1 - k);
            while start < centre
                && start + k < circ.x.len()
                && circ.x[start + k] - target < target - circ.x[start]
            {
                start += 1;
            }
            let band = start..start + k;
            let (a, b, f, h) = local_line(&circ.x[band.clone()], &circ.y[band], target, cfg.kernel);
            fit.intercepts.push(a);
            fit.slopes.push(b);
            fit.fitted.push(f);
            fit.leverage.push(h);
        }
    }
    fit.sse = values
        .iter()
        .zip(&fit.fitted)
        .map(|(y, f)| (y - f).powi(2))
        .sum();
    Ok(fit)
}

// ---------------------------------------------------------------------------
// Supersmoother
// ---------------------------------------------------------------------------

/// Error scale `σ̂_n` dividing each absolute residual.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "value")]
pub enum ErrorScale {
    /// `1.4826 · MAD` of the fit's own residuals.
    #[default]
    ResidualMad,
    Fixed(f64),
    Unit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupersmootherConfig {
    /// Short, mid and long spans.
    pub spans: [f64; 3],
    #[serde(default)]
    pub scale: ErrorScale,
}

impl Default for SupersmootherConfig {
    fn default() -> Self {
        Self {
            spans: [0.05, 0.2, 0.5],
            scale: ErrorScale::ResidualMad,
        }
    }
}

impl SupersmootherConfig {
    pub fn validate(&self) -> Result<()> {
        let [a, b, c] = self.spans;
        if !(a > 0.0 && a < b && b < c && c <= 1.0) {
            return Err(invalid(format!(
                "spans must be strictly increasing in (0, 1], got {:?}",
                self.spans
            )));
        }
        if let ErrorScale::Fixed(s) = self.scale {
            if !(s > 0.0) {
                return Err(invalid("fixed error scale must be positive"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupersmootherFit {
    pub spans: [f64; 3],
    pub fitted: Vec<f64>,
    /// Index into `spans` chosen at each point.
    pub selected: Vec<usize>,
    pub scale: Vec<f64>,
    pub sar: f64,
}

/// Scaled median absolute deviation; a normal-consistent spread estimate.
pub fn mad_scale(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let median = |v: &mut Vec<f64>| {
        v.sort_by(f64::total_cmp);
        let m = v.len() / 2;
        if v.len().is_multiple_of(2) {
            0.5 * (v[m - 1] + v[m])
        } else {
            v[m]
        }
    };
    let mut v = values.to_vec();
    let med = median(&mut v);
    let mut dev: Vec<f64> = values.iter().map(|x| (x - med).abs()).collect();
    1.4826 * median(&mut dev)
}

/// Period-independent noise scale of a series: robust spread of successive
/// differences in time order, divided by √2. Returns `None` when the
/// estimate is degenerate.
pub fn series_noise_scale(series: &TimeSeries) -> Option<f64> {
    let diffs: Vec<f64> = series.values().windows(2).map(|w| w[1] - w[0]).collect();
    let s = mad_scale(&diffs) / std::f64::consts::SQRT_2;
    (s > 1e-12).then_some(s)
}

/// Friedman-style variable-span smooth and its sum of absolute scaled
/// residuals.
///
/// Three local linear smooths are computed. Their leave-one-out absolute
/// residuals are smoothed with the mid span, and at each point the span with
/// the smallest smoothed error supplies the fitted value.
pub fn supersmoother_sar(ps: &PhasedSeries, cfg: &SupersmootherConfig) -> Result<SupersmootherFit> {
    cfg.validate()?;
    ps.require_sorted()?;
    let n = ps.len();
    if n < 10 {
        return Err(Error::InsufficientData(format!(
            "supersmoother needs at least 10 points, got {n}"
        )));
    }
    let (phases, values) = (ps.phases(), ps.values());
    let mid = LocalLinearConfig::new(cfg.spans[1], Kernel::Uniform)?;

    let mut smooths = Vec::with_capacity(3);
    let mut errors = Vec::with_capacity(3);
    for &span in &cfg.spans {
        let llc = LocalLinearConfig::new(span, Kernel::Uniform)?;
        // The shortest span may round below 3 points on small data.
        let llc = if llc.band_size(n) < 3 {
            LocalLinearConfig::new((3.0 / n as f64).min(1.0), Kernel::Uniform)?
        } else {
            llc
        };
        let fit = local_linear_raw(phases, values, &llc)?;
        let cv: Vec<f64> = values
            .iter()
            .zip(&fit.fitted)
            .zip(&fit.leverage)
            .map(|((y, f), h)| (y - f).abs() / (1.0 - h).max(1e-10))
            .collect();
        errors.push(local_linear_raw(phases, &cv, &mid)?.fitted);
        smooths.push(fit.fitted);
    }

    let mut selected = Vec::with_capacity(n);
    let mut fitted = Vec::with_capacity(n);
    for i in 0..n {
        let mut best = 0;
        for j in 1..3 {
            if errors[j][i] < errors[best][i] {
                best = j;
            }
        }
        selected.push(best);
        fitted.push(smooths[best][i]);
    }

    let residuals: Vec<f64> = values.iter().zip(&fitted).map(|(y, f)| y - f).collect();
    let sigma = match cfg.scale {
        ErrorScale::Unit => 1.0,
        ErrorScale::Fixed(s) => s,
        ErrorScale::ResidualMad => {
            let s = mad_scale(&residuals);
            if s < 1e-12 {
                1.0
            } else {
                s
            }
        }
    };
    let sar = residuals.iter().map(|r| r.abs() / sigma).sum();
    Ok(SupersmootherFit {
        spans: cfg.spans,
        fitted,
        selected,
        scale: vec![sigma; n],
        sar,
    })
}

// ---------------------------------------------------------------------------
// SSE objective
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Fitter {
    Spline(SplineConfig),
    LocalLinear(LocalLinearConfig),
}

/// Residual sum of squares of `fitter` on the series folded at `period`.
pub fn sse_objective(series: &TimeSeries, period: f64, fitter: &Fitter) -> Result<f64> {
    let ps = fold_series(series, period)?;
    match fitter {
        Fitter::Spline(cfg) => fit_periodic_spline(&ps, cfg).map(|f| f.sse),
        Fitter::LocalLinear(cfg) => fit_local_linear(&ps, cfg).map(|f| f.sse),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{regular_times, Signal};
    use std::f64::consts::TAU;

    fn phased(phases: Vec<f64>, values: Vec<f64>) -> PhasedSeries {
        PhasedSeries::new(phases, values, 1.0).unwrap()
    }

    fn grid_phases(n: usize) -> Vec<f64> {
        (0..n).map(|i| (i as f64 + 0.37) / n as f64).collect()
    }

    #[test]
    fn basis_is_partition_of_unity() {
        for k in [4, 5, 8, 13] {
            for i in 0..=100 {
                let x = i as f64 / 100.0;
                let total: f64 = (0..k).map(|b| periodic_basis(b, k, x)).sum();
                assert!((total - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn weights_derivatives_match_finite_differences() {
        let h = 1e-6;
        for order in 0..3 {
            for &u in &[0.1, 0.45, 0.9] {
                let lo = bspline_weights(u - h, order);
                let hi = bspline_weights(u + h, order);
                let d = bspline_weights(u, order + 1);
                for i in 0..4 {
                    assert!(((hi[i] - lo[i]) / (2.0 * h) - d[i]).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn spline_reproduces_constants() {
        let phases = grid_phases(40);
        let ps = phased(phases, vec![3.5; 40]);
        let fit = fit_periodic_spline(&ps, &SplineConfig::default()).unwrap();
        assert!(fit.fitted.iter().all(|f| (f - 3.5).abs() < 1e-10));
        assert!(fit.sse <= 1e-18 * 40.0 * 3.5 * 3.5);
    }

    #[test]
    fn spline_reproduces_basis_element() {
        let k = 8;
        let phases = grid_phases(50);
        let values: Vec<f64> = phases.iter().map(|&x| periodic_basis(3, k, x)).collect();
        let norm: f64 = values.iter().map(|v| v * v).sum();
        let ps = phased(phases, values);
        let fit = fit_periodic_spline(&ps, &SplineConfig::new(k).unwrap()).unwrap();
        assert!(fit.sse <= 1e-10 * norm);
        assert!(!fit.regularized);
    }

    #[test]
    fn spline_needs_data() {
        let ps = phased(vec![0.1, 0.2, 0.3], vec![1.0, 2.0, 3.0]);
        assert!(matches!(
            fit_periodic_spline(&ps, &SplineConfig::default()),
            Err(Error::DegenerateFit(_))
        ));
        assert!(SplineConfig::new(3).is_err());
    }

    #[test]
    fn spline_ridge_on_gaps() {
        let phases: Vec<f64> = (0..20).map(|i| 0.05 * i as f64 / 20.0 + 0.4).collect();
        let values: Vec<f64> = phases.iter().map(|x| x * 2.0).collect();
        let ps = phased(phases, values);
        let fit = fit_periodic_spline(&ps, &SplineConfig::default()).unwrap();
        assert!(fit.regularized);
        assert!(fit.sse.is_finite());
    }

    #[test]
    fn spline_is_periodic_c2() {
        let phases = grid_phases(30);
        let values: Vec<f64> = phases.iter().map(|x| (x * 7.3).sin() + x).collect();
        let fit = fit_periodic_spline(&phased(phases, values), &SplineConfig::default()).unwrap();
        for order in 0..3 {
            let (a, b) = (fit.derivative(0.0, order), fit.derivative(1.0, order));
            assert!((a - b).abs() <= 1e-8 * (1.0 + a.abs()), "order {order}: {a} vs {b}");
        }
    }

    #[test]
    fn local_linear_exact_for_lines() {
        let phases: Vec<f64> = (0..25).map(|i| 0.2 + 0.6 * i as f64 / 24.0).collect();
        let values: Vec<f64> = phases.iter().map(|x| 1.5 - 4.0 * x).collect();
        let ps = phased(phases, values.clone());
        let cfg = LocalLinearConfig::new(1.0, Kernel::Uniform).unwrap();
        let fit = fit_local_linear(&ps, &cfg).unwrap();
        for (f, y) in fit.fitted.iter().zip(&values) {
            assert!((f - y).abs() <= 1e-10);
        }
        let tri = LocalLinearConfig::new(1.0, Kernel::Tricube).unwrap();
        let fit = fit_local_linear(&ps, &tri).unwrap();
        assert!(fit.sse <= 1e-20);
    }

    #[test]
    fn local_linear_constant_and_errors() {
        let ps = phased(grid_phases(30), vec![2.0; 30]);
        let fit = fit_local_linear(&ps, &LocalLinearConfig::default()).unwrap();
        assert!(fit.sse < 1e-24);
        let tiny = LocalLinearConfig::new(0.05, Kernel::Uniform).unwrap();
        assert!(matches!(
            fit_local_linear(&ps, &tiny),
            Err(Error::DegenerateFit(_))
        ));
        assert!(LocalLinearConfig::new(0.0, Kernel::Uniform).is_err());
        let unsorted = phased(vec![0.5, 0.1, 0.2], vec![1.0, 2.0, 3.0]);
        assert!(fit_local_linear(&unsorted, &LocalLinearConfig::default()).is_err());
    }

    #[test]
    fn local_bands_wrap_around() {
        // A smooth periodic signal: bands near 0 must borrow from near 1.
        let phases = grid_phases(60);
        let values: Vec<f64> = phases.iter().map(|x| (TAU * x).cos()).collect();
        let ps = phased(phases, values.clone());
        let fit = fit_local_linear(&ps, &LocalLinearConfig::new(0.1, Kernel::Uniform).unwrap()).unwrap();
        // cos peaks at 0; a one-sided band would bias the first point badly
        assert!((fit.fitted[0] - values[0]).abs() < 0.02);
        assert!((fit.fitted[59] - values[59]).abs() < 0.02);
    }

    #[test]
    fn supersmoother_constant_is_zero() {
        let ps = phased(grid_phases(40), vec![1.25; 40]);
        let fit = supersmoother_sar(&ps, &SupersmootherConfig::default()).unwrap();
        assert!(fit.sar < 1e-9);
        assert!(fit.scale.iter().all(|&s| s == 1.0));
    }

    #[test]
    fn supersmoother_rejects_bad_spans() {
        let ps = phased(grid_phases(40), vec![1.0; 40]);
        for spans in [[0.2, 0.2, 0.5], [0.5, 0.2, 0.05], [0.05, 0.2, 1.5], [0.0, 0.2, 0.5]] {
            let cfg = SupersmootherConfig {
                spans,
                ..Default::default()
            };
            assert!(matches!(
                supersmoother_sar(&ps, &cfg),
                Err(Error::InvalidArgument(_))
            ));
        }
        let short = phased(grid_phases(5), vec![1.0; 5]);
        assert!(supersmoother_sar(&short, &SupersmootherConfig::default()).is_err());
    }

    #[test]
    fn supersmoother_sar_is_sum_of_scaled_residuals() {
        let phases = grid_phases(80);
        let values: Vec<f64> = phases
            .iter()
            .enumerate()
            .map(|(i, x)| (TAU * x).sin() + 0.1 * ((i * 7919 % 13) as f64 - 6.0))
            .collect();
        let ps = phased(phases, values.clone());
        let fit = supersmoother_sar(&ps, &SupersmootherConfig::default()).unwrap();
        let recomputed: f64 = values
            .iter()
            .zip(&fit.fitted)
            .zip(&fit.scale)
            .map(|((y, f), s)| (y - f).abs() / s)
            .sum();
        assert!((recomputed - fit.sar).abs() <= 1e-10 * fit.sar);
    }

    #[test]
    fn supersmoother_tracks_triangle() {
        let times = regular_times(300, 0.0, 25.0 / 300.0);
        let tri = Signal::Triangle {
            amplitude: 1.0,
            baseline: 0.0,
        };
        let values: Vec<f64> = times.iter().map(|&t| tri.at_phase(t / 1.3)).collect();
        let s = TimeSeries::new(times, values).unwrap();
        let ps = fold_series(&s, 1.3).unwrap();
        let fit = supersmoother_sar(&ps, &SupersmootherConfig::default()).unwrap();
        let range = 2.0;
        assert!(fit.sar / 300.0 <= 0.01 * range, "SAR/N = {}", fit.sar / 300.0);
    }

    #[test]
    fn supersmoother_prefers_true_period() {
        let times = regular_times(300, 0.0, 25.0 / 300.0);
        let values: Vec<f64> = times.iter().map(|t| (TAU * t).sin()).collect();
        let s = TimeSeries::new(times, values).unwrap();
        let cfg = SupersmootherConfig {
            scale: ErrorScale::Fixed(series_noise_scale(&s).unwrap()),
            ..Default::default()
        };
        let at = |p: f64| supersmoother_sar(&fold_series(&s, p).unwrap(), &cfg).unwrap().sar;
        assert!(at(1.0) < at(1.37));
    }

    #[test]
    fn mad_scale_of_known_sample() {
        assert!((mad_scale(&[1.0, 2.0, 3.0, 4.0, 100.0]) - 1.4826).abs() < 1e-12);
        assert_eq!(mad_scale(&[]), 0.0);
    }
}
