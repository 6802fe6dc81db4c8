//! `date,value` CSV ingestion and emission.
//!
//! Dates are `YYYY-MM`, rows must be strictly consecutive months, values use
//! `.` as decimal point and no thousands separators. Missing values are
//! rejected rather than imputed.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{TimeSeries, YearMonth};

/// Summary of an ingested file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestReport {
    pub n: usize,
    pub start: YearMonth,
    pub end: YearMonth,
    pub min: f64,
    pub max: f64,
}

impl IngestReport {
    pub fn of(series: &TimeSeries) -> Self {
        Self {
            n: series.len(),
            start: series.start(),
            end: series.end(),
            min: series.min(),
            max: series.max(),
        }
    }
}

/// Parse CSV text. Row numbers in errors count data rows from 1.
pub fn parse_series(text: &str, period: usize) -> Result<TimeSeries> {
    let mut lines = text
        .lines()
        .map(|l| l.trim_end_matches('\r'))
        .filter(|l| !l.trim().is_empty());
    match lines.next() {
        None => return Err(Error::NoData),
        Some(h) if h.trim().eq_ignore_ascii_case("date,value") => {}
        Some(h) => {
            return Err(Error::Parse {
                row: 0,
                message: format!("expected header `date,value`, found {h:?}"),
            })
        }
    }
    let mut start = None;
    let mut prev: Option<YearMonth> = None;
    let mut values = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = i + 1;
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                row,
                message: format!("expected 2 fields, found {}", fields.len()),
            });
        }
        let month: YearMonth = fields[0].parse().map_err(|e: Error| Error::Parse {
            row,
            message: e.to_string(),
        })?;
        if fields[1].is_empty() {
            return Err(Error::Parse {
                row,
                message: "missing value".into(),
            });
        }
        let value: f64 = fields[1].parse().map_err(|_| Error::Parse {
            row,
            message: format!("unparseable value {:?}", fields[1]),
        })?;
        if !value.is_finite() {
            return Err(Error::Parse {
                row,
                message: format!("non-finite value {:?}", fields[1]),
            });
        }
        if let Some(p) = prev {
            match p.months_until(month) {
                1 => {}
                0 => {
                    return Err(Error::Parse {
                        row,
                        message: format!("duplicate month {month}"),
                    })
                }
                gap => {
                    return Err(Error::Parse {
                        row,
                        message: format!(
                            "month {month} does not follow {p} (gap of {gap} months)"
                        ),
                    })
                }
            }
        } else {
            start = Some(month);
        }
        prev = Some(month);
        values.push(value);
    }
    let start = start.ok_or(Error::NoData)?;
    TimeSeries::new(start, period, values)
}

pub fn read_series(path: impl AsRef<Path>, period: usize) -> Result<TimeSeries> {
    let text = std::fs::read_to_string(path)?;
    parse_series(&text, period)
}

/// Render as `date,value` CSV with full round-trip precision.
pub fn write_series(series: &TimeSeries) -> String {
    let mut out = String::from("date,value\n");
    for (i, v) in series.values().iter().enumerate() {
        let _ = writeln!(out, "{},{}", series.month_at(i), v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_roundtrips() {
        let text = "date,value\n2017-01,2168.700\n2017-02,2169.241\r\n2017-03,2615.216\n";
        let s = parse_series(text, 12).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.start().to_string(), "2017-01");
        let again = parse_series(&write_series(&s), 12).unwrap();
        assert_eq!(again, s);
    }

    #[test]
    fn row_addressed_errors() {
        assert!(matches!(parse_series("", 12), Err(Error::NoData)));
        assert!(matches!(parse_series("date,value\n", 12), Err(Error::NoData)));
        let gap = "date,value\n2017-01,1\n2017-03,2\n";
        match parse_series(gap, 12) {
            Err(Error::Parse { row, .. }) => assert_eq!(row, 2),
            other => panic!("unexpected {other:?}"),
        }
        let dup = "date,value\n2017-01,1\n2017-02,2\n2017-02,3\n";
        assert!(matches!(parse_series(dup, 12), Err(Error::Parse { row: 3, .. })));
        let bad = "date,value\n2017-01,1,5\n";
        assert!(matches!(parse_series(bad, 12), Err(Error::Parse { row: 1, .. })));
        let sep = "date,value\n2017-01,\"1,234.5\"\n";
        assert!(parse_series(sep, 12).is_err());
        let missing = "date,value\n2017-01,\n";
        assert!(matches!(parse_series(missing, 12), Err(Error::Parse { row: 1, .. })));
        let nan = "date,value\n2017-01,NaN\n";
        assert!(matches!(parse_series(nan, 12), Err(Error::Parse { row: 1, .. })));
    }
}
