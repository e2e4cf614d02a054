//! Monthly series with calendar indexing, log / difference transforms and
//! days-weighted aggregation of weekly data.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use chrono::{Datelike, Days, NaiveDate};

use crate::error::{Error, Result};

/// A calendar month in the proleptic Gregorian calendar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct YearMonth {
    year: i32,
    month: u32,
}

impl YearMonth {
    pub fn new(year: i32, month: u32) -> Option<Self> {
        (1..=12).contains(&month).then_some(Self { year, month })
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn month(self) -> u32 {
        self.month
    }

    fn ordinal(self) -> i64 {
        i64::from(self.year) * 12 + i64::from(self.month) - 1
    }

    fn from_ordinal(ord: i64) -> Self {
        let year = ord.div_euclid(12) as i32;
        let month = ord.rem_euclid(12) as u32 + 1;
        Self { year, month }
    }

    /// Shifts by `months` (may be negative).
    pub fn add_months(self, months: i64) -> Self {
        Self::from_ordinal(self.ordinal() + months)
    }

    /// Signed number of months from `self` to `other`.
    pub fn months_until(self, other: Self) -> i64 {
        other.ordinal() - self.ordinal()
    }

    pub fn first_day(self) -> NaiveDate {
        NaiveDate::from_ymd_opt(self.year, self.month, 1).expect("valid calendar month")
    }

    pub fn days_in_month(self) -> u32 {
        let next = self.add_months(1).first_day();
        next.signed_duration_since(self.first_day()).num_days() as u32
    }

    pub fn of_date(date: NaiveDate) -> Self {
        Self { year: date.year(), month: date.month() }
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseYearMonthError;

impl fmt::Display for ParseYearMonthError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("expected a year-month of the form YYYY-MM")
    }
}

impl FromStr for YearMonth {
    type Err = ParseYearMonthError;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        let (y, m) = s.trim().split_once('-').ok_or(ParseYearMonthError)?;
        if y.len() != 4 || m.len() != 2 || !y.bytes().chain(m.bytes()).all(|b| b.is_ascii_digit()) {
            return Err(ParseYearMonthError);
        }
        let year = y.parse().map_err(|_| ParseYearMonthError)?;
        let month = m.parse().map_err(|_| ParseYearMonthError)?;
        Self::new(year, month).ok_or(ParseYearMonthError)
    }
}

/// Which transformation produced the stored values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Transform {
    Level,
    Log,
    Diff,
    LogDiff,
}

impl Transform {
    pub fn label(self) -> &'static str {
        match self {
            Transform::Level => "level",
            Transform::Log => "log",
            Transform::Diff => "diff",
            Transform::LogDiff => "log_diff",
        }
    }
}

/// Measurement units; levels of `Percent` and `Index` series must lie in [0, 100].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Units {
    Percent,
    Index,
    Unrestricted,
}

/// Gap-free monthly observations: value `k` belongs to `start + k` months.
#[derive(Debug, Clone, PartialEq)]
pub struct MonthlySeries {
    id: String,
    start: YearMonth,
    values: Vec<f64>,
    transform: Transform,
    units: Units,
}

impl MonthlySeries {
    /// Builds a level series, validating finiteness and the unit range.
    pub fn new(id: impl Into<String>, start: YearMonth, values: Vec<f64>, units: Units) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        check_finite(&values)?;
        if units != Units::Unrestricted {
            if let Some((index, &value)) =
                values.iter().enumerate().find(|(_, v)| !(0.0..=100.0).contains(*v))
            {
                return Err(Error::OutOfRange { index, value });
            }
        }
        Ok(Self { id: id.into(), start, values, transform: Transform::Level, units })
    }

    /// Convenience constructor for unit-free data (simulations, residuals).
    pub fn unrestricted(id: impl Into<String>, start: YearMonth, values: Vec<f64>) -> Result<Self> {
        Self::new(id, start, values, Units::Unrestricted)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn start(&self) -> YearMonth {
        self.start
    }

    /// Last observed month.
    pub fn end(&self) -> YearMonth {
        self.start.add_months(self.values.len() as i64 - 1)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn transform(&self) -> Transform {
        self.transform
    }

    pub fn units(&self) -> Units {
        self.units
    }

    pub fn month_at(&self, index: usize) -> YearMonth {
        self.start.add_months(index as i64)
    }

    pub fn get(&self, month: YearMonth) -> Option<f64> {
        let k = self.start.months_until(month);
        usize::try_from(k).ok().and_then(|k| self.values.get(k).copied())
    }

    /// Restricts to `[from, to]` (inclusive), which must lie within the series.
    pub fn window(&self, from: YearMonth, to: YearMonth) -> Result<Self> {
        if from > to || from < self.start || to > self.end() {
            return Err(Error::WindowOutOfRange);
        }
        let a = self.start.months_until(from) as usize;
        let b = self.start.months_until(to) as usize;
        Ok(Self { values: self.values[a..=b].to_vec(), start: from, ..self.clone() })
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFiniteValue { index }),
        None => Ok(()),
    }
}

/// `out[k] = s[k+1] - s[k]`; the start advances by one month.
///
/// Differencing a differenced series yields a higher-order difference; the
/// transform tag stays `Diff` / `LogDiff`.
pub fn first_difference(s: &MonthlySeries) -> Result<MonthlySeries> {
    if s.len() < 2 {
        return Err(Error::SeriesTooShort { needed: 2, got: s.len() });
    }
    let values = s.values.windows(2).map(|w| w[1] - w[0]).collect();
    let transform = match s.transform {
        Transform::Level | Transform::Diff => Transform::Diff,
        Transform::Log | Transform::LogDiff => Transform::LogDiff,
    };
    Ok(MonthlySeries { values, start: s.start.add_months(1), transform, ..s.clone() })
}

/// Inverse of [`first_difference`]: rebuilds levels from differences and
/// the first level value.
pub fn cumulate(diff: &MonthlySeries, first_value: f64) -> MonthlySeries {
    let mut values = Vec::with_capacity(diff.len() + 1);
    values.push(first_value);
    let mut acc = first_value;
    for d in &diff.values {
        acc += d;
        values.push(acc);
    }
    let transform = match diff.transform {
        Transform::LogDiff => Transform::Log,
        _ => Transform::Level,
    };
    MonthlySeries { values, start: diff.start.add_months(-1), transform, ..diff.clone() }
}

/// Elementwise natural logarithm of a level series.
pub fn log_transform(s: &MonthlySeries) -> Result<MonthlySeries> {
    if s.transform != Transform::Level {
        return Err(Error::InvalidTransform("logarithm applies to level series only"));
    }
    if let Some(index) = s.values.iter().position(|v| *v <= 0.0) {
        return Err(Error::NonPositiveValue { index });
    }
    let values = s.values.iter().map(|v| libm::log(*v)).collect();
    Ok(MonthlySeries { values, transform: Transform::Log, ..s.clone() })
}

/// Restricts two series to their common months.
pub fn align(a: &MonthlySeries, b: &MonthlySeries) -> Result<(MonthlySeries, MonthlySeries)> {
    let from = a.start.max(b.start);
    let to = a.end().min(b.end());
    if from > to {
        return Err(Error::NoOverlap);
    }
    Ok((a.window(from, to)?, b.window(from, to)?))
}

/// Consecutive weekly observations; week `k` starts `7k` days after the first.
#[derive(Debug, Clone, PartialEq)]
pub struct WeeklySeries {
    id: String,
    first_week: NaiveDate,
    values: Vec<f64>,
}

impl WeeklySeries {
    pub fn new(id: impl Into<String>, first_week: NaiveDate, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        check_finite(&values)?;
        if let Some((index, &value)) =
            values.iter().enumerate().find(|(_, v)| !(0.0..=100.0).contains(*v))
        {
            return Err(Error::OutOfRange { index, value });
        }
        Ok(Self { id: id.into(), first_week, values })
    }

    /// Builds from dated rows, checking the exact 7-day spacing.
    pub fn from_dated(id: impl Into<String>, rows: &[(NaiveDate, f64)]) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptySeries)?.0;
        for (index, w) in rows.windows(2).enumerate() {
            if w[1].0.signed_duration_since(w[0].0).num_days() != 7 {
                return Err(Error::NonWeeklySpacing { index });
            }
        }
        Self::new(id, first, rows.iter().map(|r| r.1).collect())
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn first_week(&self) -> NaiveDate {
        self.first_week
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn week_start(&self, k: usize) -> NaiveDate {
        self.first_week + Days::new(7 * k as u64)
    }
}

/// Per-month accumulation of weekly values: `(Σ value·days, covered days)`.
pub fn month_weights(w: &WeeklySeries) -> BTreeMap<YearMonth, (f64, u32)> {
    let mut buckets: BTreeMap<YearMonth, (f64, u32)> = BTreeMap::new();
    for (k, v) in w.values.iter().enumerate() {
        let start = w.week_start(k);
        for d in 0..7 {
            let day = start + Days::new(d);
            let e = buckets.entry(YearMonth::of_date(day)).or_insert((0.0, 0));
            e.0 += v;
            e.1 += 1;
        }
    }
    buckets
}

/// Days-weighted monthly means of a weekly series.
///
/// Each week contributes its value times the number of its days inside the
/// month; the sum is divided by the month length. Months only partly covered
/// at either end of the data are dropped.
pub fn aggregate_weekly_to_monthly(w: &WeeklySeries) -> Result<MonthlySeries> {
    let full: Vec<(YearMonth, f64)> = month_weights(w)
        .into_iter()
        .filter(|(m, (_, days))| *days == m.days_in_month())
        .map(|(m, (sum, days))| (m, sum / f64::from(days)))
        .collect();
    let (start, _) = *full.first().ok_or(Error::CoverageGap)?;
    // weeks are contiguous, so full months are too
    debug_assert!(full.iter().enumerate().all(|(k, (m, _))| *m == start.add_months(k as i64)));
    let values = full.into_iter().map(|(_, v)| v).collect();
    MonthlySeries::new(w.id.to_string(), start, values, Units::Index)
}
