//! CSV and JSON renderings of curves, estimates and benchmark reports.
//!
//! Floats are written in shortest round-trip form, so both formats parse
//! back to identical values.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::harness::study::{BenchCell, BenchReport, Condition, StudyConfig, StudyKind};
use crate::search::{Interval, Method, ObjectiveCurve, PeriodEstimate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(invalid(format!("unknown format {s:?}"))),
        }
    }
}

/// Anything the harness can write out.
#[derive(Debug, Clone, Copy)]
pub enum Output<'a> {
    Report(&'a BenchReport),
    Curve(&'a ObjectiveCurve),
    Estimate(&'a PeriodEstimate),
}

fn ser_err(e: impl std::fmt::Display) -> Error {
    Error::Serialization(e.to_string())
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn emit_report(output: Output<'_>, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut bytes = match output {
                Output::Report(r) => serde_json::to_vec_pretty(r),
                Output::Curve(c) => serde_json::to_vec_pretty(c),
                Output::Estimate(e) => serde_json::to_vec_pretty(e),
            }
            .map_err(ser_err)?;
            bytes.push(b'\n');
            Ok(bytes)
        }
        Format::Csv => match output {
            Output::Report(r) => report_csv(r),
            Output::Curve(c) => curve_csv(c),
            Output::Estimate(e) => estimate_csv(e),
        },
    }
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>> {
    w.into_inner().map_err(ser_err)
}

/// `period,statistic`; undefined statistics are empty fields.
fn curve_csv(curve: &ObjectiveCurve) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["period", "statistic"]).map_err(ser_err)?;
    for (p, s) in curve.periods.iter().zip(&curve.statistic) {
        w.write_record([p.to_string(), opt(*s)]).map_err(ser_err)?;
    }
    finish(w)
}

fn estimate_csv(e: &PeriodEstimate) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["method", "period", "statistic", "significant", "ci_low", "ci_high"])
        .map_err(ser_err)?;
    w.write_record([
        e.method.to_string(),
        e.period.to_string(),
        e.statistic.to_string(),
        e.significant.map(|b| b.to_string()).unwrap_or_default(),
        opt(e.ci.map(|c| c.low)),
        opt(e.ci.map(|c| c.high)),
    ])
    .map_err(ser_err)?;
    finish(w)
}

const REPORT_COLUMNS: [&str; 7] = [
    "method",
    "proportion",
    "noise_multiple",
    "total_variance_multiple",
    "mse",
    "accuracy_rate",
    "estimates",
];

/// Metadata as `# key=value` lines, then one row per cell. Replicate
/// estimates are `;`-joined in one field.
fn report_csv(r: &BenchReport) -> Result<Vec<u8>> {
    let study = serde_json::to_string(&r.study).map_err(ser_err)?;
    let config = serde_json::to_string(&r.config).map_err(ser_err)?;
    let mut out = format!(
        "# schema_version={}\n# software_version={}\n# study={}\n# config={}\n",
        r.schema_version,
        r.software_version,
        study.trim_matches('"'),
        config
    )
    .into_bytes();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(REPORT_COLUMNS).map_err(ser_err)?;
    for c in &r.cells {
        let estimates: Vec<String> = c.estimates.iter().map(f64::to_string).collect();
        w.write_record([
            c.method.to_string(),
            c.condition.proportion.to_string(),
            opt(c.condition.noise_multiple),
            opt(c.condition.total_variance_multiple),
            c.mse.to_string(),
            c.accuracy_rate.to_string(),
            estimates.join(";"),
        ])
        .map_err(ser_err)?;
    }
    out.extend(finish(w)?);
    Ok(out)
}

fn num(s: &str, line: usize) -> Result<f64> {
    s.parse::<f64>().map_err(|_| Error::Parse {
        line,
        message: format!("{s:?} is not a number"),
    })
}

fn opt_num(s: &str, line: usize) -> Result<Option<f64>> {
    if s.is_empty() {
        Ok(None)
    } else {
        num(s, line).map(Some)
    }
}

fn records(text: &str) -> Result<Vec<(usize, csv::StringRecord)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    reader
        .records()
        .map(|r| {
            let r = r.map_err(ser_err)?;
            Ok((r.position().map_or(0, |p| p.line() as usize), r))
        })
        .collect()
}

/// Reads a curve written by [`emit_report`] in CSV form.
pub fn parse_curve_csv(text: &str, method: Method) -> Result<ObjectiveCurve> {
    let mut periods = Vec::new();
    let mut statistic = Vec::new();
    for (line, r) in records(text)? {
        periods.push(num(&r[0], line)?);
        statistic.push(opt_num(&r[1], line)?);
    }
    ObjectiveCurve::new(method, periods, statistic)
}

/// Reads a single estimate written by [`emit_report`] in CSV form.
pub fn parse_estimate_csv(text: &str) -> Result<PeriodEstimate> {
    let rows = records(text)?;
    let (line, r) = rows
        .into_iter()
        .next()
        .ok_or_else(|| Error::InsufficientData("no estimate row".into()))?;
    let ci = match (opt_num(&r[4], line)?, opt_num(&r[5], line)?) {
        (Some(low), Some(high)) => Some(Interval { low, high }),
        _ => None,
    };
    Ok(PeriodEstimate {
        method: r[0].parse()?,
        period: num(&r[1], line)?,
        statistic: num(&r[2], line)?,
        significant: match &r[3] {
            "" => None,
            s => Some(s.parse::<bool>().map_err(ser_err)?),
        },
        ci,
    })
}

/// Reads a benchmark report written by [`emit_report`] in CSV form.
pub fn parse_report_csv(text: &str) -> Result<BenchReport> {
    let meta = |key: &str| -> Result<&str> {
        let prefix = format!("# {key}=");
        text.lines()
            .find_map(|l| l.strip_prefix(prefix.as_str()))
            .ok_or_else(|| Error::Serialization(format!("missing {key} metadata")))
    };
    let schema_version = meta("schema_version")?.parse::<u32>().map_err(ser_err)?;
    let software_version = meta("software_version")?.to_string();
    let study: StudyKind = serde_json::from_str(&format!("\"{}\"", meta("study")?)).map_err(ser_err)?;
    let config: StudyConfig = serde_json::from_str(meta("config")?).map_err(ser_err)?;

    let mut cells = Vec::new();
    for (line, r) in records(text)? {
        let estimates = if r[6].is_empty() {
            Vec::new()
        } else {
            r[6].split(';').map(|s| num(s, line)).collect::<Result<_>>()?
        };
        cells.push(BenchCell {
            method: r[0].parse()?,
            condition: Condition {
                proportion: num(&r[1], line)?,
                noise_multiple: opt_num(&r[2], line)?,
                total_variance_multiple: opt_num(&r[3], line)?,
            },
            mse: num(&r[4], line)?,
            accuracy_rate: num(&r[5], line)?,
            estimates,
        });
    }
    Ok(BenchReport {
        schema_version,
        software_version,
        study,
        config,
        cells,
    })
}

pub fn parse_report_json(bytes: &[u8]) -> Result<BenchReport> {
    serde_json::from_slice(bytes).map_err(ser_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::make_period_grid;

    fn curve() -> ObjectiveCurve {
        let grid = make_period_grid(0.5, 2.0, 0.005).unwrap();
        let stats = grid
            .periods()
            .iter()
            .enumerate()
            .map(|(i, p)| (i != 7).then_some(p.sin() / 3.0))
            .collect();
        ObjectiveCurve::new(Method::Pdm, grid.periods().to_vec(), stats).unwrap()
    }

    #[test]
    fn curve_csv_shape() {
        let c = curve();
        let text = String::from_utf8(emit_report(Output::Curve(&c), Format::Csv).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 302);
        assert_eq!(lines[0], "period,statistic");
        assert!(lines[8].ends_with(','), "{}", lines[8]);
        assert_eq!(parse_curve_csv(&text, Method::Pdm).unwrap(), c);
    }

    #[test]
    fn curve_json_round_trip() {
        let c = curve();
        let bytes = emit_report(Output::Curve(&c), Format::Json).unwrap();
        let back: ObjectiveCurve = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.statistic[7], None);
    }

    #[test]
    fn estimate_round_trips() {
        let e = PeriodEstimate {
            period: 13.14,
            statistic: 0.1 + 0.2,
            method: Method::LombScargle,
            significant: Some(true),
            ci: Some(Interval { low: 13.1, high: 13.2 }),
        };
        let csv = emit_report(Output::Estimate(&e), Format::Csv).unwrap();
        assert_eq!(parse_estimate_csv(std::str::from_utf8(&csv).unwrap()).unwrap(), e);
        let json = emit_report(Output::Estimate(&e), Format::Json).unwrap();
        assert_eq!(serde_json::from_slice::<PeriodEstimate>(&json).unwrap(), e);
    }

    #[test]
    fn format_names() {
        assert_eq!("CSV".parse::<Format>().unwrap(), Format::Csv);
        assert!("xml".parse::<Format>().is_err());
    }
}
