//! Calendar dates and the trading-day calendar used for lagging.

use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CalendarError {
    #[error("invalid date '{0}' (expected YYYY-MM-DD)")]
    InvalidDate(String),
    #[error("{0} is not a trading day")]
    NotTradingDay(CalendarDate),
    #[error("{date} has fewer than {needed} earlier trading days")]
    InsufficientHistory { date: CalendarDate, needed: usize },
    #[error("trading calendar is empty")]
    Empty,
}

/// A Gregorian calendar day, interpreted in UTC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CalendarDate(NaiveDate);

impl CalendarDate {
    pub fn from_ymd(year: i32, month: u32, day: u32) -> Result<Self, CalendarError> {
        NaiveDate::from_ymd_opt(year, month, day)
            .map(CalendarDate)
            .ok_or_else(|| CalendarError::InvalidDate(format!("{year:04}-{month:02}-{day:02}")))
    }

    pub fn year(&self) -> i32 {
        self.0.year()
    }

    pub fn month(&self) -> u32 {
        self.0.month()
    }

    pub fn day(&self) -> u32 {
        self.0.day()
    }

    /// Monday = 0 .. Sunday = 6.
    pub fn weekday_index(&self) -> u32 {
        self.0.weekday().num_days_from_monday()
    }

    pub fn is_weekend(&self) -> bool {
        self.weekday_index() >= 5
    }

    pub fn succ(&self) -> Self {
        CalendarDate(self.0.succ_opt().expect("date overflow"))
    }

    pub fn as_naive(&self) -> NaiveDate {
        self.0
    }
}

impl From<NaiveDate> for CalendarDate {
    fn from(d: NaiveDate) -> Self {
        CalendarDate(d)
    }
}

impl fmt::Display for CalendarDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.format("%Y-%m-%d"))
    }
}

impl FromStr for CalendarDate {
    type Err = CalendarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        NaiveDate::parse_from_str(s, "%Y-%m-%d")
            .map(CalendarDate)
            .map_err(|_| CalendarError::InvalidDate(s.to_string()))
    }
}

impl Serialize for CalendarDate {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CalendarDate {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Strictly increasing, non-empty list of trading days.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TradingCalendar {
    days: Vec<CalendarDate>,
}

impl TradingCalendar {
    /// Builds a calendar from any collection of dates; duplicates are merged.
    pub fn new(days: impl IntoIterator<Item = CalendarDate>) -> Result<Self, CalendarError> {
        let mut days: Vec<CalendarDate> = days.into_iter().collect();
        days.sort_unstable();
        days.dedup();
        if days.is_empty() {
            return Err(CalendarError::Empty);
        }
        Ok(TradingCalendar { days })
    }

    /// Weekdays in `[start, end]` minus the listed holidays.
    pub fn weekdays(start: CalendarDate, end: CalendarDate, holidays: &[CalendarDate]) -> Result<Self, CalendarError> {
        let mut days = Vec::new();
        let mut d = start;
        while d <= end {
            if !d.is_weekend() && !holidays.contains(&d) {
                days.push(d);
            }
            d = d.succ();
        }
        Self::new(days)
    }

    pub fn days(&self) -> &[CalendarDate] {
        &self.days
    }

    pub fn len(&self) -> usize {
        self.days.len()
    }

    pub fn is_empty(&self) -> bool {
        self.days.is_empty()
    }

    pub fn contains(&self, d: CalendarDate) -> bool {
        self.days.binary_search(&d).is_ok()
    }

    pub fn position(&self, d: CalendarDate) -> Option<usize> {
        self.days.binary_search(&d).ok()
    }

    /// The `k`-th trading day strictly before `d`.
    pub fn previous_trading_day(&self, d: CalendarDate, k: usize) -> Result<CalendarDate, CalendarError> {
        let pos = self.position(d).ok_or(CalendarError::NotTradingDay(d))?;
        if k > pos {
            return Err(CalendarError::InsufficientHistory { date: d, needed: k });
        }
        Ok(self.days[pos - k])
    }
}

/// Free-function form of [`TradingCalendar::previous_trading_day`].
pub fn previous_trading_day(cal: &TradingCalendar, d: CalendarDate, k: usize) -> Result<CalendarDate, CalendarError> {
    cal.previous_trading_day(d, k)
}
