//! Explainable dependence statistics between daily aspect sentiment scores
//! mined from social-media text and stock closing prices.
//!
//! The pipeline runs ingest → label → aggregate → score → lag-align →
//! {Pearson r, Granger F-test, uncertainty coefficient} for every
//! (aspect, score kind, ticker) cell, and writes CSV reports.

pub mod calendar;
pub mod ingest;
pub mod labeler;
pub mod report;
pub mod scores;
pub mod series;
pub mod stats;
pub mod synth;

pub use calendar::{previous_trading_day, CalendarDate, CalendarError, TradingCalendar};
pub use series::{align_lagged, AlignError, AlignedPairs, PolarityLabel, PriceSeries, ScoreKind, SentimentSeries};
