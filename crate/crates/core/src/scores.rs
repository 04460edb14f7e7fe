//! Daily aspect sentiment scores built from polarity labels.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calendar::CalendarDate;
use crate::ingest::LabeledAspect;
use crate::series::{PolarityLabel, ScoreKind, SentimentSeries};

/// Label counts for one aspect on one day. `total()` is the day's `x_fs`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AspectDayCount {
    pub aspect: String,
    pub date: CalendarDate,
    pub pos: u64,
    pub neg: u64,
    pub neu: u64,
}

impl AspectDayCount {
    pub fn total(&self) -> u64 {
        self.pos + self.neg + self.neu
    }

    /// Value of one score kind; `None` for a normalised kind when the day has no labels.
    pub fn score(&self, kind: ScoreKind) -> Option<f64> {
        let total = self.total();
        match kind {
            ScoreKind::AbsPositive => Some(self.pos as f64),
            ScoreKind::AbsNegative => Some(self.neg as f64),
            ScoreKind::NormPositive => (total > 0).then(|| self.pos as f64 / total as f64),
            ScoreKind::NormNegative => (total > 0).then(|| self.neg as f64 / total as f64),
        }
    }
}

/// Sums labels into one count record per `(aspect, date)`, ordered by aspect then date.
pub fn aggregate_daily(labels: &[LabeledAspect]) -> Vec<AspectDayCount> {
    let mut acc: BTreeMap<(&str, CalendarDate), [u64; 3]> = BTreeMap::new();
    for l in labels {
        let slot = acc.entry((l.aspect.as_str(), l.date)).or_default();
        match l.polarity {
            PolarityLabel::Positive => slot[0] += 1,
            PolarityLabel::Negative => slot[1] += 1,
            PolarityLabel::Neutral => slot[2] += 1,
        }
    }
    acc.into_iter()
        .map(|((aspect, date), [pos, neg, neu])| AspectDayCount { aspect: aspect.to_string(), date, pos, neg, neu })
        .collect()
}

/// Extracts one aspect's series of one kind. Days with no count record stay absent.
pub fn score_series(counts: &[AspectDayCount], aspect: &str, kind: ScoreKind) -> SentimentSeries {
    let mut series = SentimentSeries::new(aspect, kind);
    for c in counts.iter().filter(|c| c.aspect == aspect) {
        if let Some(v) = c.score(kind) {
            series.values.insert(c.date, v);
        }
    }
    series
}

/// Total label count per aspect over all days.
pub fn aspect_totals(counts: &[AspectDayCount]) -> BTreeMap<String, u64> {
    let mut totals = BTreeMap::new();
    for c in counts {
        *totals.entry(c.aspect.clone()).or_default() += c.total();
    }
    totals
}

/// Writes the audit file `aspect,date,kind,value`.
///
/// Besides the four score kinds, each record also emits its day total under
/// kind `fs`, which makes the file sufficient to rebuild the counts.
pub fn write_scores<W: Write>(out: W, counts: &[AspectDayCount]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["aspect", "date", "kind", "value"])?;
    for c in counts {
        let date = c.date.to_string();
        let mut row = |kind: &str, value: String| w.write_record([c.aspect.as_str(), &date, kind, &value]);
        row("fp", c.pos.to_string())?;
        row("fn", c.neg.to_string())?;
        row("fs", c.total().to_string())?;
        for kind in [ScoreKind::NormPositive, ScoreKind::NormNegative] {
            if let Some(v) = c.score(kind) {
                row(kind.tag(), format!("{v}"))?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Error)]
pub enum ScoreFileError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Rebuilds count records from a file written by [`write_scores`].
pub fn read_scores(content: &str) -> Result<Vec<AspectDayCount>, ScoreFileError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(content.as_bytes());
    let mut acc: BTreeMap<(String, CalendarDate), [Option<u64>; 3]> = BTreeMap::new();
    for (i, row) in rdr.records().enumerate() {
        let line = i + 2;
        let row = row?;
        let err = |message: String| ScoreFileError::Format { line, message };
        if row.len() != 4 {
            return Err(err(format!("expected 4 fields, found {}", row.len())));
        }
        let date: CalendarDate = row[1].parse().map_err(|e| err(format!("{e}")))?;
        let slot = match row[2].trim() {
            "fp" => 0,
            "fn" => 1,
            "fs" => 2,
            "nfp" | "nfn" => continue,
            other => return Err(err(format!("unknown kind '{other}'"))),
        };
        let value: u64 = row[3].parse().map_err(|_| err(format!("'{}' is not a count", &row[3])))?;
        acc.entry((row[0].to_string(), date)).or_default()[slot] = Some(value);
    }
    acc.into_iter()
        .map(|((aspect, date), slots)| match slots {
            [Some(pos), Some(neg), Some(total)] if pos + neg <= total => {
                Ok(AspectDayCount { aspect, date, pos, neg, neu: total - pos - neg })
            }
            _ => Err(ScoreFileError::Format {
                line: 0,
                message: format!("{aspect} {date}: needs consistent fp, fn and fs rows"),
            }),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn label(aspect: &str, day: &str, p: PolarityLabel) -> LabeledAspect {
        LabeledAspect { tweet_id: "t".into(), date: day.parse().unwrap(), aspect: aspect.into(), polarity: p }
    }

    #[test]
    fn counts_by_aspect_and_day() {
        use PolarityLabel::*;
        let labels = vec![
            label("inflation", "2022-10-03", Negative),
            label("inflation", "2022-10-03", Negative),
            label("inflation", "2022-10-03", Negative),
            label("tax", "2022-10-04", Positive),
            label("tax", "2022-10-04", Positive),
            label("tax", "2022-10-04", Neutral),
        ];
        let counts = aggregate_daily(&labels);
        assert_eq!(counts.len(), 2);
        assert_eq!((counts[0].pos, counts[0].neg, counts[0].neu), (0, 3, 0));
        assert_eq!(counts[1].total(), 3);
        assert!(aggregate_daily(&[]).is_empty());
    }

    fn count(pos: u64, neg: u64, neu: u64) -> AspectDayCount {
        AspectDayCount { aspect: "a".into(), date: "2022-10-03".parse().unwrap(), pos, neg, neu }
    }

    #[test]
    fn normalised_scores() {
        let c = vec![count(3, 1, 1)];
        assert_eq!(score_series(&c, "a", ScoreKind::NormPositive).values.values().next(), Some(&0.6));
        let c = vec![count(0, 0, 4)];
        assert_eq!(score_series(&c, "a", ScoreKind::NormPositive).values.values().next(), Some(&0.0));
        assert_eq!(score_series(&c, "a", ScoreKind::NormNegative).values.values().next(), Some(&0.0));
    }

    #[test]
    fn zero_total_is_missing_not_zero() {
        let c = vec![count(0, 0, 0)];
        assert!(score_series(&c, "a", ScoreKind::NormPositive).is_empty());
        assert_eq!(score_series(&c, "a", ScoreKind::AbsPositive).len(), 1);
    }

    #[test]
    fn absent_aspect_has_no_entries() {
        let c = vec![count(1, 1, 1)];
        for kind in ScoreKind::ALL {
            assert!(score_series(&c, "other", kind).is_empty());
        }
    }

    #[test]
    fn score_file_round_trip() {
        let counts = vec![
            count(3, 1, 1),
            AspectDayCount { date: "2022-10-04".parse().unwrap(), ..count(0, 0, 0) },
            AspectDayCount { aspect: "interest rate".into(), ..count(2, 5, 0) },
        ];
        let mut buf = Vec::new();
        write_scores(&mut buf, &counts).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("aspect,date,kind,value\n"));
        assert_eq!(read_scores(&text).unwrap(), counts);
    }

    proptest! {
        #[test]
        fn aggregation_is_order_invariant(
            raw in proptest::collection::vec((0usize..3, 0usize..4, 0usize..3), 0..60),
            seed in any::<u64>(),
        ) {
            let aspects = ["tax", "bank", "rate"];
            let days = ["2022-10-03", "2022-10-04", "2022-10-05", "2022-10-06"];
            let pols = [PolarityLabel::Positive, PolarityLabel::Neutral, PolarityLabel::Negative];
            let labels: Vec<_> = raw.iter().map(|&(a, d, p)| label(aspects[a], days[d], pols[p])).collect();
            let mut shuffled = labels.clone();
            // deterministic permutation
            let n = shuffled.len();
            if n > 1 {
                let mut s = seed;
                for i in (1..n).rev() {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
                    shuffled.swap(i, (s >> 33) as usize % (i + 1));
                }
            }
            prop_assert_eq!(aggregate_daily(&labels), aggregate_daily(&shuffled));
            let total: u64 = aggregate_daily(&labels).iter().map(|c| c.total()).sum();
            prop_assert_eq!(total as usize, labels.len());
        }
    }
}
