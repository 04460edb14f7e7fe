//! Date-indexed sentiment and price series, and lag alignment between them.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calendar::{CalendarDate, CalendarError, TradingCalendar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolarityLabel {
    Positive,
    Neutral,
    Negative,
}

impl PolarityLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            PolarityLabel::Positive => "positive",
            PolarityLabel::Neutral => "neutral",
            PolarityLabel::Negative => "negative",
        }
    }
}

impl fmt::Display for PolarityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolarityLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "positive" => Ok(PolarityLabel::Positive),
            "neutral" => Ok(PolarityLabel::Neutral),
            "negative" => Ok(PolarityLabel::Negative),
            other => Err(format!("unknown polarity '{other}'")),
        }
    }
}

/// Which daily aspect sentiment score a series holds.
///
/// Absolute scores are label counts; normalised scores divide a count by the
/// day's total label count for the aspect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ScoreKind {
    #[serde(rename = "fp")]
    AbsPositive,
    #[serde(rename = "fn")]
    AbsNegative,
    #[serde(rename = "nfp")]
    NormPositive,
    #[serde(rename = "nfn")]
    NormNegative,
}

impl ScoreKind {
    pub const ALL: [ScoreKind; 4] =
        [ScoreKind::AbsPositive, ScoreKind::AbsNegative, ScoreKind::NormPositive, ScoreKind::NormNegative];

    /// Short tag used in file names and CSV columns (`fp`, `fn`, `nfp`, `nfn`).
    pub fn tag(&self) -> &'static str {
        match self {
            ScoreKind::AbsPositive => "fp",
            ScoreKind::AbsNegative => "fn",
            ScoreKind::NormPositive => "nfp",
            ScoreKind::NormNegative => "nfn",
        }
    }

    pub fn is_normalised(&self) -> bool {
        matches!(self, ScoreKind::NormPositive | ScoreKind::NormNegative)
    }
}

impl fmt::Display for ScoreKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ScoreKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ScoreKind::ALL.into_iter().find(|k| k.tag() == s.trim()).ok_or_else(|| format!("unknown score kind '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SentimentSeries {
    pub aspect: String,
    pub kind: ScoreKind,
    pub values: BTreeMap<CalendarDate, f64>,
}

impl SentimentSeries {
    pub fn new(aspect: impl Into<String>, kind: ScoreKind) -> Self {
        SentimentSeries { aspect: aspect.into(), kind, values: BTreeMap::new() }
    }

    pub fn get(&self, d: CalendarDate) -> Option<f64> {
        self.values.get(&d).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// For absolute kinds, fills every trading day without an observation with 0.
    /// Normalised kinds are returned unchanged: an absent day has no defined ratio.
    pub fn with_absent_as_zero(mut self, cal: &TradingCalendar) -> Self {
        if !self.kind.is_normalised() {
            for &d in cal.days() {
                self.values.entry(d).or_insert(0.0);
            }
        }
        self
    }

    /// Values on each trading day of `cal`, `None` where missing.
    pub fn on_calendar(&self, cal: &TradingCalendar) -> Vec<Option<f64>> {
        cal.days().iter().map(|&d| self.get(d)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PriceError {
    #[error("closing price for {ticker} on {date} must be positive and finite, got {value}")]
    NonPositive { ticker: String, date: CalendarDate, value: f64 },
}

/// Closing prices for one ticker.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    ticker: String,
    values: BTreeMap<CalendarDate, f64>,
}

impl PriceSeries {
    pub fn new(
        ticker: impl Into<String>,
        values: impl IntoIterator<Item = (CalendarDate, f64)>,
    ) -> Result<Self, PriceError> {
        let ticker = ticker.into();
        let values: BTreeMap<_, _> = values.into_iter().collect();
        if let Some((&date, &value)) = values.iter().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
            return Err(PriceError::NonPositive { ticker, date, value });
        }
        Ok(PriceSeries { ticker, values })
    }

    pub fn ticker(&self) -> &str {
        &self.ticker
    }

    pub fn values(&self) -> &BTreeMap<CalendarDate, f64> {
        &self.values
    }

    pub fn get(&self, d: CalendarDate) -> Option<f64> {
        self.values.get(&d).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dates(&self) -> impl Iterator<Item = CalendarDate> + '_ {
        self.values.keys().copied()
    }

    pub fn on_calendar(&self, cal: &TradingCalendar) -> Vec<Option<f64>> {
        cal.days().iter().map(|&d| self.get(d)).collect()
    }
}

/// `(x, y)` pairs where `x` is observed `lag_days` trading days before `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedPairs {
    pub pairs: Vec<(f64, f64)>,
    /// Trading day of each `y` value, ascending.
    pub y_dates: Vec<CalendarDate>,
    pub lag_days: usize,
}

impl AlignedPairs {
    /// Pairs built directly from values, with no date bookkeeping.
    pub fn from_values(pairs: Vec<(f64, f64)>, lag_days: usize) -> Self {
        AlignedPairs { pairs, y_dates: Vec::new(), lag_days }
    }

    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    pub fn xs(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.1).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlignError {
    #[error("lag must be at least one trading day")]
    ZeroLag,
    #[error("no (sentiment, price) pairs remain after alignment")]
    EmptyAlignment,
    #[error(transparent)]
    Calendar(#[from] CalendarError),
}

/// Pairs each price day `t` with the sentiment value `lag` trading days earlier.
///
/// Days where either value is missing, or whose predecessor falls before the
/// calendar start, are skipped.
pub fn align_lagged(
    x: &SentimentSeries,
    y: &PriceSeries,
    cal: &TradingCalendar,
    lag: usize,
) -> Result<AlignedPairs, AlignError> {
    if lag == 0 {
        return Err(AlignError::ZeroLag);
    }
    let mut pairs = Vec::new();
    let mut y_dates = Vec::new();
    for (&t, &yv) in y.values() {
        let prev = match cal.previous_trading_day(t, lag) {
            Ok(d) => d,
            Err(CalendarError::InsufficientHistory { .. }) => continue,
            Err(e) => return Err(e.into()),
        };
        if let Some(xv) = x.get(prev) {
            pairs.push((xv, yv));
            y_dates.push(t);
        }
    }
    if pairs.is_empty() {
        return Err(AlignError::EmptyAlignment);
    }
    Ok(AlignedPairs { pairs, y_dates, lag_days: lag })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q4_calendar(days: usize) -> TradingCalendar {
        let start: CalendarDate = "2022-10-03".parse().unwrap();
        let end: CalendarDate = "2023-03-31".parse().unwrap();
        let cal = TradingCalendar::weekdays(start, end, &[]).unwrap();
        TradingCalendar::new(cal.days()[..days].iter().copied()).unwrap()
    }

    fn dense(cal: &TradingCalendar, f: impl Fn(usize) -> f64) -> (SentimentSeries, PriceSeries) {
        let mut x = SentimentSeries::new("inflation", ScoreKind::AbsPositive);
        for (i, &d) in cal.days().iter().enumerate() {
            x.values.insert(d, i as f64);
        }
        let y = PriceSeries::new("NEE", cal.days().iter().enumerate().map(|(i, &d)| (d, f(i)))).unwrap();
        (x, y)
    }

    #[test]
    fn dense_series_lose_one_pair_per_lag_day() {
        let cal = q4_calendar(62);
        let (x, y) = dense(&cal, |i| 50.0 + i as f64);
        let aligned = align_lagged(&x, &y, &cal, 1).unwrap();
        assert_eq!(aligned.n(), 61);
        // x at t-1 equals index - 1
        for (k, &(xv, yv)) in aligned.pairs.iter().enumerate() {
            assert_eq!(xv, k as f64);
            assert_eq!(yv, 50.0 + (k + 1) as f64);
        }
    }

    #[test]
    fn interior_gap_drops_one_pair() {
        let cal = q4_calendar(62);
        let (mut x, y) = dense(&cal, |i| 50.0 + i as f64);
        x.values.remove(&cal.days()[30]);
        let aligned = align_lagged(&x, &y, &cal, 1).unwrap();
        assert_eq!(aligned.n(), 60);
        assert!(!aligned.y_dates.contains(&cal.days()[31]));
    }

    #[test]
    fn weekend_sentiment_is_ignored() {
        let cal = q4_calendar(10);
        let (mut x, y) = dense(&cal, |_| 10.0);
        // a Saturday value must never be picked up
        x.values.insert("2022-10-08".parse().unwrap(), 999.0);
        let aligned = align_lagged(&x, &y, &cal, 1).unwrap();
        assert!(aligned.pairs.iter().all(|p| p.0 != 999.0));
        // Monday pairs with Friday
        let monday: CalendarDate = "2022-10-10".parse().unwrap();
        let idx = aligned.y_dates.iter().position(|&d| d == monday).unwrap();
        assert_eq!(aligned.pairs[idx].0, 4.0);
    }

    #[test]
    fn empty_and_zero_lag() {
        let cal = q4_calendar(5);
        let (_, y) = dense(&cal, |_| 1.0);
        let x = SentimentSeries::new("tax", ScoreKind::AbsNegative);
        assert_eq!(align_lagged(&x, &y, &cal, 1), Err(AlignError::EmptyAlignment));
        let (x, y) = dense(&cal, |_| 1.0);
        assert_eq!(align_lagged(&x, &y, &cal, 0), Err(AlignError::ZeroLag));
    }

    #[test]
    fn price_outside_calendar_is_an_error() {
        let cal = q4_calendar(5);
        let (x, _) = dense(&cal, |_| 1.0);
        let y = PriceSeries::new("BP", [("2022-10-08".parse().unwrap(), 1.0)]).unwrap();
        assert!(matches!(align_lagged(&x, &y, &cal, 1), Err(AlignError::Calendar(CalendarError::NotTradingDay(_)))));
    }

    #[test]
    fn prices_must_be_positive() {
        let d: CalendarDate = "2022-10-03".parse().unwrap();
        assert!(PriceSeries::new("BP", [(d, 0.0)]).is_err());
        assert!(PriceSeries::new("BP", [(d, f64::NAN)]).is_err());
    }

    #[test]
    fn absent_as_zero_only_touches_absolute_kinds() {
        let cal = q4_calendar(5);
        let mut abs = SentimentSeries::new("tax", ScoreKind::AbsPositive);
        abs.values.insert(cal.days()[0], 2.0);
        let mut norm = abs.clone();
        norm.kind = ScoreKind::NormPositive;
        assert_eq!(abs.with_absent_as_zero(&cal).len(), 5);
        assert_eq!(norm.with_absent_as_zero(&cal).len(), 1);
    }

    #[test]
    fn score_kind_tags_round_trip() {
        for k in ScoreKind::ALL {
            assert_eq!(k.tag().parse::<ScoreKind>().unwrap(), k);
        }
        assert!("fs".parse::<ScoreKind>().is_err());
    }

    proptest! {
        #[test]
        fn dense_count_is_days_minus_lag(days in 2usize..80, lag in 1usize..10) {
            prop_assume!(lag < days);
            let cal = q4_calendar(days);
            let (x, y) = dense(&cal, |i| 1.0 + i as f64);
            let aligned = align_lagged(&x, &y, &cal, lag).unwrap();
            prop_assert_eq!(aligned.n(), days - lag);
            prop_assert!(aligned.y_dates.windows(2).all(|w| w[0] < w[1]));
        }

        #[test]
        fn relabelling_dates_keeps_values(shift in 1usize..40) {
            let cal = q4_calendar(30);
            let shifted = {
                let full = q4_calendar(30 + shift);
                TradingCalendar::new(full.days()[shift..].iter().copied()).unwrap()
            };
            let (x, y) = dense(&cal, |i| 2.0 + (i * i) as f64);
            let (x2, y2) = dense(&shifted, |i| 2.0 + (i * i) as f64);
            let a = align_lagged(&x, &y, &cal, 1).unwrap();
            let b = align_lagged(&x2, &y2, &shifted, 1).unwrap();
            prop_assert_eq!(a.pairs, b.pairs);
        }
    }
}
