//! Reading time series from delimited text.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Layout of a delimited time-series file.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvOptions {
    pub delimiter: u8,
    pub time_column: usize,
    pub value_column: usize,
    /// Rows whose value equals this sentinel are dropped.
    pub missing_value: Option<f64>,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            delimiter: b',',
            time_column: 0,
            value_column: 1,
            missing_value: None,
        }
    }
}

impl CsvOptions {
    /// PSMSL monthly mean sea level files: `year.fraction; height_mm; flags`
    /// separated by `;`, with `-99999` for missing months.
    pub fn psmsl() -> Self {
        Self {
            delimiter: b';',
            missing_value: Some(-99999.0),
            ..Self::default()
        }
    }
}

/// Parses `time,value` records from a file. See [`parse_csv`].
pub fn ingest_csv(path: impl AsRef<Path>, opts: &CsvOptions) -> Result<TimeSeries> {
    let path = path.as_ref();
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_csv(&text, opts, label)
}

/// Parses `time,value` records. Lines starting with `#` are comments; the
/// first record is skipped as a header if its time field is not a number.
/// Rows are sorted by time (stable), and repeated times are kept.
pub fn parse_csv(text: &str, opts: &CsvOptions, label: impl Into<String>) -> Result<TimeSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(opts.delimiter)
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut pairs = Vec::new();
    let mut first = true;
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let field = |i: usize, what: &str| -> Result<&str> {
            record.get(i).ok_or_else(|| Error::Parse {
                line,
                message: format!("missing {what} column {i}"),
            })
        };
        let time_text = field(opts.time_column, "time")?;
        let time = match time_text.parse::<f64>() {
            Ok(t) => t,
            Err(_) if first => {
                first = false;
                continue;
            }
            Err(_) => {
                return Err(Error::Parse {
                    line,
                    message: format!("time {time_text:?} is not a number"),
                })
            }
        };
        first = false;
        let value_text = field(opts.value_column, "value")?;
        let value = value_text.parse::<f64>().map_err(|_| Error::Parse {
            line,
            message: format!("value {value_text:?} is not a number"),
        })?;
        if !time.is_finite() || !value.is_finite() {
            return Err(Error::Parse {
                line,
                message: "non-finite number".into(),
            });
        }
        if opts.missing_value == Some(value) {
            continue;
        }
        pairs.push((time, value));
    }
    if pairs.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} valid rows; need at least 2",
            pairs.len()
        )));
    }
    TimeSeries::from_unsorted(pairs, label)
}
