
use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use cyclefind::harness::report::{parse_curve_csv, parse_report_csv, parse_report_json};
use cyclefind::harness::*;
use cyclefind::prelude::*;
use proptest::prelude::*;

fn small_study(methods: Vec<Method>) -> StudyConfig {
    let mut cfg = StudyConfig::sea_level(methods);
    cfg.proportions = vec![0.3, 0.6];
    cfg.noise_multiples = vec![0.0, 1.5];
    cfg.replicates = 6;
    cfg.grid = make_period_grid(0.8, 1.25, 0.005).unwrap();
    cfg
}

fn base() -> TimeSeries {
    sea_level_standin(110.0, 90.53, 3).unwrap()
}

#[test]
fn reports_are_byte_identical_across_runs_and_workers() {
    let cfg = small_study(vec![Method::LombScargle, Method::Pdm, Method::LocalSse]);
    let b = base();
    for run in [run_missing_data_study, run_noise_study] {
        let first = run(&b, &cfg, 1).unwrap();
        let again = run(&b, &cfg, 1).unwrap();
        let parallel = run(&b, &cfg, 3).unwrap();
        for format in [Format::Json, Format::Csv] {
            let bytes = emit_report(Output::Report(&first), format).unwrap();
            assert_eq!(bytes, emit_report(Output::Report(&again), format).unwrap());
            assert_eq!(bytes, emit_report(Output::Report(&parallel), format).unwrap());
        }
    }
}

#[test]
fn reports_cover_every_cell_and_round_trip() {
    let methods = vec![Method::LombScargle, Method::SplineSse, Method::Ren];
    let cfg = small_study(methods.clone());
    let b = base();
    let missing = run_missing_data_study(&b, &cfg, 2).unwrap();
    let noise = run_noise_study(&b, &cfg, 2).unwrap();
    for (report, conditions) in [(&missing, cfg.proportions.len()), (&noise, cfg.noise_multiples.len())] {
        assert_eq!(report.schema_version, 1);
        assert_eq!(report.cells.len(), methods.len() * conditions);
        assert!(report.cells.iter().all(|c| c.estimates.len() == cfg.replicates));
        assert!(report.summaries_consistent());
        for c in &report.cells {
            assert_eq!(c.mse, mse(&c.estimates, 1.0).unwrap());
            assert_eq!(c.accuracy_rate, accuracy_rate(&c.estimates, &cfg.accuracy).unwrap());
        }

        let json = emit_report(Output::Report(report), Format::Json).unwrap();
        assert_eq!(&parse_report_json(&json).unwrap(), report);
        let csv = emit_report(Output::Report(report), Format::Csv).unwrap();
        assert_eq!(&parse_report_csv(std::str::from_utf8(&csv).unwrap()).unwrap(), report);
    }
    let cell = noise.cell(Method::LombScargle, 1.5).unwrap();
    assert_eq!(cell.condition.total_variance_multiple, Some(3.25));
    assert_eq!(cell.condition.label(), "3.25sigma^2");
}

#[test]
fn clean_base_is_recovered_exactly() {
    let clean = sea_level_standin(1.0, 0.0, 0).unwrap();
    let mut cfg = StudyConfig::sea_level(Method::ALL.to_vec());
    cfg.replicates = 1;
    cfg.proportions = vec![1.0];
    cfg.noise_multiples = vec![0.0];
    for report in [
        run_missing_data_study(&clean, &cfg, 1).unwrap(),
        run_noise_study(&clean, &cfg, 1).unwrap(),
    ] {
        for c in &report.cells {
            assert_eq!(c.estimates, vec![1.0], "{}", c.method);
            assert_eq!(c.mse, 0.0);
            assert_eq!(c.accuracy_rate, 1.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn curves_round_trip_with_undefined_entries(
        stats in prop::collection::vec(prop::option::weighted(0.8, any::<f64>().prop_filter("finite", |x| x.is_finite())), 1..80),
    ) {
        let periods: Vec<f64> = (0..stats.len()).map(|i| 0.5 + 0.005 * i as f64).collect();
        let curve = ObjectiveCurve::new(Method::Ren, periods, stats).unwrap();
        let csv = emit_report(Output::Curve(&curve), Format::Csv).unwrap();
        let text = std::str::from_utf8(&csv).unwrap();
        prop_assert_eq!(text.lines().count(), curve.len() + 1);
        prop_assert_eq!(parse_curve_csv(text, Method::Ren).unwrap(), curve.clone());
        let json = emit_report(Output::Curve(&curve), Format::Json).unwrap();
        prop_assert_eq!(serde_json::from_slice::<ObjectiveCurve>(&json).unwrap(), curve);
    }
}

#[test]
fn ingest_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("station.csv");
    std::fs::write(&path, "# monthly means\ntime,value\n2000.5,3\n2000.0,1\n2000.25,2\n").unwrap();
    let s = ingest_csv(&path, &CsvOptions::default()).unwrap();
    assert_eq!(s.times(), &[2000.0, 2000.25, 2000.5]);
    assert_eq!(s.label(), "station");
    assert!(matches!(
        ingest_csv(dir.path().join("missing.csv"), &CsvOptions::default()),
        Err(Error::Io(_))
    ));
}

#[test]
fn config_file_drives_the_study() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("study.toml");
    std::fs::write(
        &path,
        "grid = \"0.9:1.1:0.01\"\nmethods = [\"lomb-scargle\", \"pdm\"]\nreplicates = 3\nproportions = [0.5]\nseed = 9\n",
    )
    .unwrap();
    let cfg = HarnessConfig::load(&path).unwrap();
    let study = cfg.study_config().unwrap();
    assert_eq!(study.methods, vec![Method::LombScargle, Method::Pdm]);
    assert_eq!(study.grid.len(), 21);
    let report = run_missing_data_study(&base(), &study, 1).unwrap();
    assert_eq!(report.cells.len(), 2);
    assert_eq!(report.config.master_seed, 9);
}

/// Serves `body` for paths ending in `/ok`, 404 otherwise; counts requests.
fn serve(body: &'static [u8]) -> (String, Arc<AtomicUsize>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let hits = Arc::new(AtomicUsize::new(0));
    let counter = hits.clone();
    std::thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            counter.fetch_add(1, Ordering::SeqCst);
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut request_line = String::new();
            reader.read_line(&mut request_line).unwrap();
            loop {
                let mut line = String::new();
                if reader.read_line(&mut line).unwrap() == 0 || line == "\r\n" {
                    break;
                }
            }
            let path = request_line.split_whitespace().nth(1).unwrap_or("");
            let (status, payload): (&str, &[u8]) = if path.ends_with("/ok") {
                ("200 OK", body)
            } else {
                ("404 Not Found", b"no such record")
            };
            let head = format!(
                "HTTP/1.1 {status}\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
                payload.len()
            );
            let _ = stream.write_all(head.as_bytes());
            let _ = stream.write_all(payload);
        }
    });
    (format!("http://{addr}/data/{{id}}"), hits)
}

fn fetcher(template: &str, dir: &std::path::Path) -> Fetcher {
    let mut f = Fetcher::new(template, dir);
    f.offline = false;
    f
}

#[test]
fn fetch_downloads_once_then_uses_cache() {
    let (template, hits) = serve(b"1992.0417;  7023;0;000\n1992.1250;  7051;0;000\n");
    let dir = tempfile::tempdir().unwrap();
    let f = fetcher(&template, dir.path());
    let first = f.fetch("ok").unwrap();
    let bytes = std::fs::read(&first).unwrap();
    let second = f.fetch("ok").unwrap();
    assert_eq!(first, second);
    assert_eq!(std::fs::read(&second).unwrap(), bytes);
    assert_eq!(hits.load(Ordering::SeqCst), 1);
    let s = ingest_csv(&first, &CsvOptions::psmsl()).unwrap();
    assert_eq!(s.values(), &[7023.0, 7051.0]);
}

#[test]
fn fetch_reports_http_status() {
    let (template, _) = serve(b"");
    let dir = tempfile::tempdir().unwrap();
    match fetcher(&template, dir.path()).fetch("absent") {
        Err(Error::Http { status, .. }) => assert_eq!(status, 404),
        other => panic!("{other:?}"),
    }
    assert!(!dir.path().join("absent.dat").exists());
}

#[test]
fn cache_hit_needs_no_network() {
    let dir = tempfile::tempdir().unwrap();
    // Port 9 on a TEST-NET address: any network attempt would fail.
    let mut f = fetcher("http://192.0.2.1:9/{id}", dir.path());
    std::fs::write(f.cache_path("256"), b"cached").unwrap();
    assert_eq!(std::fs::read(f.fetch("256").unwrap()).unwrap(), b"cached");

    f.offline = true;
    assert!(matches!(f.fetch("257"), Err(Error::Offline(_))));
}
