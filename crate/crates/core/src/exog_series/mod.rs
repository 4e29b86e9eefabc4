//! Day-indexed exogenous inputs: BTC price, transaction fees and the
//! historical hash rate the model is correlated against.
//!
//! Day 0 is the genesis block, 2009-01-03 00:00 UTC. Lookups interpolate
//! linearly between knots and refuse to extrapolate; future values have to be
//! spliced on explicitly.

mod csv_io;
mod fetch;

use std::fmt;
use std::str::FromStr;

use chrono::{Duration, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use csv_io::{load_csv, parse_csv, write_csv};
pub use fetch::{
    chart_base_url, chart_url, fetch_chart, fetch_chart_with, parse_chart_json, Chart,
    HttpTransport, Transport, CHART_BASE_ENV, DEFAULT_CHART_BASE,
};

/// Unix timestamp of 2009-01-03 00:00:00 UTC.
pub const GENESIS_UNIX: i64 = 1_230_940_800;
pub const SECONDS_PER_DAY: f64 = 86_400.0;

pub fn genesis_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(2009, 1, 3).expect("valid date")
}

pub fn day_from_date(date: NaiveDate) -> f64 {
    (date - genesis_date()).num_days() as f64
}

/// Calendar date containing model day `day` (fractional days round down).
pub fn date_from_day(day: f64) -> NaiveDate {
    genesis_date() + Duration::days(day.floor() as i64)
}

pub fn day_from_unix(seconds: f64) -> f64 {
    (seconds - GENESIS_UNIX as f64) / SECONDS_PER_DAY
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Unit {
    #[serde(rename = "USD/BTC")]
    UsdPerBtc,
    #[serde(rename = "BTC/day")]
    BtcPerDay,
    #[serde(rename = "GH/s")]
    GhPerSecond,
    #[serde(rename = "blocks")]
    Blocks,
}

impl Unit {
    pub fn as_str(self) -> &'static str {
        match self {
            Unit::UsdPerBtc => "USD/BTC",
            Unit::BtcPerDay => "BTC/day",
            Unit::GhPerSecond => "GH/s",
            Unit::Blocks => "blocks",
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Unit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "USD/BTC" => Ok(Unit::UsdPerBtc),
            "BTC/day" => Ok(Unit::BtcPerDay),
            "GH/s" => Ok(Unit::GhPerSecond),
            "blocks" => Ok(Unit::Blocks),
            other => Err(Error::params(format!("unknown unit {other:?}"))),
        }
    }
}

/// An immutable, validated time series: strictly increasing days,
/// non-negative finite values, at least two knots.
#[derive(Debug, Clone, PartialEq)]
pub struct ExogenousSeries {
    name: String,
    unit: Unit,
    days: Vec<f64>,
    values: Vec<f64>,
}

impl ExogenousSeries {
    pub fn new(name: impl Into<String>, unit: Unit, points: Vec<(f64, f64)>) -> Result<Self> {
        let (days, values) = points.into_iter().unzip();
        Self::from_columns(name, unit, days, values)
    }

    pub fn from_columns(
        name: impl Into<String>,
        unit: Unit,
        days: Vec<f64>,
        values: Vec<f64>,
    ) -> Result<Self> {
        assert_eq!(days.len(), values.len(), "column length mismatch");
        validate_points(&days, &values)?;
        Ok(ExogenousSeries {
            name: name.into(),
            unit,
            days,
            values,
        })
    }

    /// A series holding `value` at both ends of `[start, end]`.
    pub fn constant(
        name: impl Into<String>,
        unit: Unit,
        value: f64,
        start: f64,
        end: f64,
    ) -> Result<Self> {
        Self::new(name, unit, vec![(start, value), (end, value)])
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn len(&self) -> usize {
        self.days.len()
    }

    pub fn is_empty(&self) -> bool {
        self.days.is_empty()
    }

    pub fn days(&self) -> &[f64] {
        &self.days
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = (f64, f64)> + '_ {
        self.days.iter().copied().zip(self.values.iter().copied())
    }

    pub fn first_day(&self) -> f64 {
        self.days[0]
    }

    pub fn last_day(&self) -> f64 {
        self.days[self.days.len() - 1]
    }

    pub fn covers(&self, start: f64, end: f64) -> bool {
        self.first_day() <= start && end <= self.last_day()
    }

    /// Linear interpolation between the bracketing knots; exact at knots.
    pub fn value_at(&self, t: f64) -> Result<f64> {
        if !(self.first_day() <= t && t <= self.last_day()) {
            return Err(Error::OutOfRange {
                t,
                first: self.first_day(),
                last: self.last_day(),
            });
        }
        // index of the first knot with day >= t
        let i = self.days.partition_point(|&d| d < t);
        if self.days[i] == t {
            return Ok(self.values[i]);
        }
        let (d0, d1) = (self.days[i - 1], self.days[i]);
        let (v0, v1) = (self.values[i - 1], self.values[i]);
        Ok(v0 + (v1 - v0) * (t - d0) / (d1 - d0))
    }

    /// Appends `future` to this series. A future knot on the last historical
    /// day is dropped in favour of the historical value.
    pub fn splice(&self, future: &ExogenousSeries) -> Result<ExogenousSeries> {
        self.extend_with(&future.points().collect::<Vec<_>>())
    }

    /// Same boundary rule as [`splice`](Self::splice) for a raw point list,
    /// which may be empty.
    pub fn extend_with(&self, future: &[(f64, f64)]) -> Result<ExogenousSeries> {
        let end = self.last_day();
        if let Some(&(start, _)) = future.first() {
            if start < end {
                return Err(Error::SpliceOverlap {
                    historical_end: end,
                    future_start: start,
                });
            }
        }
        let mut days = self.days.clone();
        let mut values = self.values.clone();
        for &(d, v) in future.iter().skip_while(|(d, _)| *d == end) {
            days.push(d);
            values.push(v);
        }
        Self::from_columns(self.name.clone(), self.unit, days, values)
    }

    /// Restriction to `[first_day, t]`, with an interpolated knot at `t`.
    pub fn truncate_at(&self, t: f64) -> Result<ExogenousSeries> {
        let v = self.value_at(t)?;
        let keep = self.days.partition_point(|&d| d < t);
        let mut days = self.days[..keep].to_vec();
        let mut values = self.values[..keep].to_vec();
        days.push(t);
        values.push(v);
        if days.len() < 2 {
            return Err(Error::TooFewPoints(days.len()));
        }
        Self::from_columns(self.name.clone(), self.unit, days, values)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

fn validate_points(days: &[f64], values: &[f64]) -> Result<()> {
    if days.len() < 2 {
        return Err(Error::TooFewPoints(days.len()));
    }
    for (i, (&d, &v)) in days.iter().zip(values).enumerate() {
        if !d.is_finite() {
            return Err(Error::NonFinite {
                what: "day",
                index: i,
            });
        }
        if !v.is_finite() {
            return Err(Error::NonFinite {
                what: "value",
                index: i,
            });
        }
        if v < 0.0 {
            return Err(Error::NegativeValue { day: d, value: v });
        }
        if i > 0 && d <= days[i - 1] {
            return Err(Error::NonMonotoneDays {
                day: d,
                previous: days[i - 1],
            });
        }
    }
    Ok(())
}
