//! Monthly time series container and calendar arithmetic.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A calendar month, serialized as `YYYY-MM`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct YearMonth {
    year: i32,
    month: u8,
}

impl YearMonth {
    pub fn new(year: i32, month: u8) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::argument(format!("month {month} outside 1..=12")));
        }
        Ok(Self { year, month })
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn month(self) -> u8 {
        self.month
    }

    fn ordinal(self) -> i64 {
        self.year as i64 * 12 + (self.month as i64 - 1)
    }

    fn from_ordinal(ord: i64) -> Self {
        Self {
            year: ord.div_euclid(12) as i32,
            month: (ord.rem_euclid(12) + 1) as u8,
        }
    }

    /// Shift by a signed number of months.
    pub fn add_months(self, months: i64) -> Self {
        Self::from_ordinal(self.ordinal() + months)
    }

    /// Signed number of months from `self` to `other`.
    pub fn months_until(self, other: YearMonth) -> i64 {
        other.ordinal() - self.ordinal()
    }

    /// Three-letter English month name, as used in report tables.
    pub fn month_abbrev(self) -> &'static str {
        const NAMES: [&str; 12] = [
            "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec",
        ];
        NAMES[self.month as usize - 1]
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for YearMonth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::argument(format!("expected YYYY-MM, got {s:?}"));
        let (y, m) = s.trim().split_once('-').ok_or_else(bad)?;
        if y.len() != 4 || m.len() != 2 {
            return Err(bad());
        }
        let year: i32 = y.parse().map_err(|_| bad())?;
        let month: u8 = m.parse().map_err(|_| bad())?;
        YearMonth::new(year, month)
    }
}

impl Serialize for YearMonth {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for YearMonth {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Ordered, complete, finite observations tagged with a start month and a
/// seasonal period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSeries")]
pub struct TimeSeries {
    start: YearMonth,
    period: usize,
    values: Vec<f64>,
}

#[derive(Deserialize)]
struct RawSeries {
    start: YearMonth,
    period: usize,
    values: Vec<f64>,
}

impl TryFrom<RawSeries> for TimeSeries {
    type Error = Error;

    fn try_from(raw: RawSeries) -> Result<Self> {
        TimeSeries::new(raw.start, raw.period, raw.values)
    }
}

impl TimeSeries {
    pub fn new(start: YearMonth, period: usize, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::NoData);
        }
        if period == 0 {
            return Err(Error::argument("period must be at least 1"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain {
                index: i,
                message: format!("non-finite value {}", values[i]),
            });
        }
        Ok(Self {
            start,
            period,
            values,
        })
    }

    /// Monthly series (period 12).
    pub fn monthly(start: YearMonth, values: Vec<f64>) -> Result<Self> {
        Self::new(start, 12, values)
    }

    pub fn start(&self) -> YearMonth {
        self.start
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Calendar month of observation `i`.
    pub fn month_at(&self, i: usize) -> YearMonth {
        self.start.add_months(i as i64)
    }

    /// Month of the last observation.
    pub fn end(&self) -> YearMonth {
        self.month_at(self.len() - 1)
    }

    /// Same calendar tags, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.start, self.period, values)
    }

    pub fn with_start(mut self, start: YearMonth) -> Self {
        self.start = start;
        self
    }

    /// Split into the first `n_train` observations and the remainder.
    pub fn split_at(&self, n_train: usize) -> Result<(TimeSeries, Option<TimeSeries>)> {
        if n_train == 0 || n_train > self.len() {
            return Err(Error::argument(format!(
                "training length {n_train} outside 1..={}",
                self.len()
            )));
        }
        let train = Self::new(self.start, self.period, self.values[..n_train].to_vec())?;
        let test = if n_train < self.len() {
            Some(Self::new(
                self.month_at(n_train),
                self.period,
                self.values[n_train..].to_vec(),
            )?)
        } else {
            None
        };
        Ok((train, test))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

impl AsRef<[f64]> for TimeSeries {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}
