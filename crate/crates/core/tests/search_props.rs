mod common;

use common::*;
use cyclefind::prelude::*;
use cyclefind::search::{percentile_interval, scan_with_workers};
use proptest::prelude::*;

fn noisy_sea_level(seed: u64) -> TimeSeries {
    let model = SyntheticModel::new(Signal::sine(110.0), 1.0, 90.53).unwrap();
    let s = generate(&model, &regular_times(300, 1.0 / 12.0, 1.0 / 12.0), seed).unwrap();
    subsample(&s, &SamplingSpec::new(0.6, seed + 9).unwrap()).unwrap()
}

fn curve_strategy() -> impl Strategy<Value = (bool, Vec<Option<f64>>)> {
    (
        any::<bool>(),
        prop::collection::vec(prop::option::weighted(0.9, -50.0..50.0f64), 1..60),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn selection_survives_monotone_transforms((maximize, stats) in curve_strategy()) {
        prop_assume!(stats.iter().any(Option::is_some));
        let method = if maximize { Method::LombScargle } else { Method::Pdm };
        let periods: Vec<f64> = (0..stats.len()).map(|i| 1.0 + 0.01 * i as f64).collect();
        let curve = ObjectiveCurve::new(method, periods.clone(), stats.clone()).unwrap();
        let base = select_estimate(&curve).unwrap().period;
        let transforms: [fn(f64) -> f64; 4] = [
            |x| 3.0 * x + 7.0,
            |x| x * x * x,
            f64::atan,
            |x| (x / 10.0).exp(),
        ];
        for g in transforms {
            let mapped = stats.iter().map(|s| s.map(g)).collect();
            let c = ObjectiveCurve::new(method, periods.clone(), mapped).unwrap();
            prop_assert_eq!(select_estimate(&c).unwrap().period, base);
        }
    }

    #[test]
    fn percentile_interval_ignores_replicate_order(
        mut xs in prop::collection::vec(0.5..2.0f64, 1..80),
        alpha in 0.01..0.5f64,
        seed in any::<u64>(),
    ) {
        let a = percentile_interval(&xs, alpha).unwrap();
        let mut rng = cyclefind::rng::stream(seed);
        rand::seq::SliceRandom::shuffle(xs.as_mut_slice(), &mut rng);
        prop_assert_eq!(percentile_interval(&xs, alpha).unwrap(), a);
        prop_assert!(a.low <= a.high);
    }
}

#[test]
fn scans_cover_the_grid_for_every_method() {
    let s = noisy_sea_level(1);
    let grid = make_period_grid(0.5, 2.0, 0.05).unwrap();
    let cfg = MethodConfig::default();
    for method in Method::ALL {
        let curve = scan(&s, &grid, method, &cfg).unwrap();
        assert_eq!(curve.len(), grid.len(), "{method}");
        assert_eq!(curve.periods, grid.periods());
        assert_eq!(curve.sense, method.sense());
    }
}

#[test]
fn value_scaling_keeps_the_estimate() {
    let s = noisy_sea_level(2);
    let grid = make_period_grid(0.5, 2.0, 0.01).unwrap();
    let cfg = MethodConfig::default();
    for c in [1e-3, 0.37, 25.0] {
        let scaled = s.map_values(|y| c * y).unwrap();
        for method in Method::ALL {
            let a = estimate(&s, &grid, method, &cfg).unwrap().period;
            let b = estimate(&scaled, &grid, method, &cfg).unwrap().period;
            assert_eq!(a, b, "{method} at scale {c}");
        }
    }
}

#[test]
fn worker_count_does_not_change_scans() {
    let s = noisy_sea_level(3);
    let grid = sea_level_grid();
    let cfg = MethodConfig::default();
    for method in [Method::LombScargle, Method::Pdm, Method::SplineSse, Method::SupersmootherSar] {
        let one = scan_with_workers(&s, &grid, method, &cfg, 1).unwrap();
        let four = scan_with_workers(&s, &grid, method, &cfg, 4).unwrap();
        assert_eq!(one, four, "{method}");
    }
}

#[test]
fn scan_examples() {
    let grid = sea_level_grid();
    let cfg = MethodConfig::default();
    let flat = TimeSeries::new(regular_times(50, 0.0, 0.3), vec![2.5; 50]).unwrap();
    let curve = scan(&flat, &grid, Method::Lk, &cfg).unwrap();
    assert!(curve.statistic.iter().all(|s| *s == Some(0.0)));

    let curve = scan(&clean_sine(), &grid, Method::SplineSse, &cfg).unwrap();
    assert_eq!(select_estimate(&curve).unwrap().period, 1.0);

    let mut bad = cfg;
    bad.local.span = 0.0;
    assert!(matches!(scan(&flat, &grid, Method::LocalSse, &bad), Err(Error::InvalidArgument(_))));
}

#[test]
fn significance_examples() {
    let grid = sea_level_grid();
    let cfg = MethodConfig::default();
    let strong = clean_sine().map_values(|y| 50.0 * y).unwrap();
    let curve = scan(&strong, &grid, Method::LombScargle, &cfg).unwrap();
    let est = select_estimate(&curve).unwrap();
    let flagged = annotate_significance(&est, &curve, 0.01, strong.variance()).unwrap();
    assert_eq!(flagged.significant, Some(true));
    assert_eq!(flagged.period, est.period);

    let weak = clean_sine().map_values(|y| 1e-3 * y).unwrap();
    let curve = scan(&weak, &grid, Method::LombScargle, &cfg).unwrap();
    let est = select_estimate(&curve).unwrap();
    let near_one = annotate_significance(&est, &curve, 1.0 - 1e-12, 1.0).unwrap();
    assert_eq!(near_one.significant, Some(true));

    let pdm_curve = scan(&weak, &grid, Method::Pdm, &cfg).unwrap();
    let pdm_est = select_estimate(&pdm_curve).unwrap();
    assert!(annotate_significance(&pdm_est, &pdm_curve, 0.01, 1.0).is_err());
}

/// The threshold is a single-frequency level, so the pure-noise check scans
/// a band narrower than one resolution element `1/T`, where the global
/// maximum behaves like a single-frequency draw.
#[test]
fn pure_noise_is_rarely_significant() {
    let cfg = MethodConfig::default();
    let times = uneven_times(100, 42);
    let span = times[times.len() - 1] - times[0];
    let f0 = 0.1;
    let half_band = 0.4 / span;
    let grid = make_period_grid(1.0 / (f0 + half_band), 1.0 / (f0 - half_band), 0.01).unwrap();
    let mut significant = 0;
    for seed in 0..100 {
        let s = white_noise(times.clone(), 1.0, seed);
        let curve = scan(&s, &grid, Method::LombScargle, &cfg).unwrap();
        let est = select_estimate(&curve).unwrap();
        if annotate_significance(&est, &curve, 0.01, 1.0).unwrap().significant == Some(true) {
            significant += 1;
        }
    }
    assert!(significant <= 5, "{significant} of 100 noise series flagged");
}

#[test]
fn bootstrap_examples() {
    let s = clean_sine().map_values(|y| 10.0 * y).unwrap();
    let grid = sea_level_grid();
    let cfg = MethodConfig::default();
    let boot = BootstrapConfig {
        replicates: 200,
        seed: 17,
        ..BootstrapConfig::default()
    };
    let a = bootstrap_ci(&s, &grid, Method::LombScargle, &cfg, &boot, 1).unwrap();
    let ci = a.ci.unwrap();
    assert!(ci.low <= 1.0 && 1.0 <= ci.high, "{ci:?}");
    assert!(ci.high - ci.low <= 2.0 * 0.005 + 1e-12, "{ci:?}");
    assert!(ci.low <= a.period && a.period <= ci.high);

    let b = bootstrap_ci(&s, &grid, Method::LombScargle, &cfg, &boot, 3).unwrap();
    assert_eq!(a, b);

    let zero = BootstrapConfig {
        replicates: 0,
        ..boot
    };
    assert!(matches!(
        bootstrap_ci(&s, &grid, Method::LombScargle, &cfg, &zero, 1),
        Err(Error::InvalidArgument(_))
    ));
}

#[test]
fn bootstrap_seeds_matter_on_noisy_data() {
    let s = noisy_sea_level(8);
    let grid = make_period_grid(0.8, 1.2, 0.005).unwrap();
    let cfg = MethodConfig::default();
    let run = |seed| {
        let boot = BootstrapConfig {
            replicates: 60,
            seed,
            ..BootstrapConfig::default()
        };
        bootstrap_ci(&s, &grid, Method::LombScargle, &cfg, &boot, 2).unwrap()
    };
    assert_eq!(run(1), run(1));
    let ci = run(1).ci.unwrap();
    assert!(ci.low <= 1.0 && 1.0 <= ci.high, "{ci:?}");
}
