use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{read_file, IngestError};
use crate::calendar::CalendarDate;
use crate::series::PolarityLabel;

/// One polarity label for one aspect occurrence in one tweet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledAspect {
    pub tweet_id: String,
    pub date: CalendarDate,
    pub aspect: String,
    pub polarity: PolarityLabel,
}

const LABEL_HEADER: [&str; 4] = ["tweet_id", "date", "aspect", "polarity"];

/// Parses `tweet_id,date,aspect,polarity` CSV content. Duplicate rows are kept.
pub fn read_labeled(source: &str, content: &str) -> Result<Vec<LabeledAspect>, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(content.as_bytes());
    let headers = rdr.headers().map_err(|e| IngestError::Csv { path: source.to_string(), source: e })?;
    if headers.iter().collect::<Vec<_>>() != LABEL_HEADER {
        return Err(IngestError::HeaderMismatch {
            path: source.to_string(),
            message: format!("expected {}", LABEL_HEADER.join(",")),
        });
    }
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let line = i + 2;
        let format_err = |message: String| IngestError::Format { path: source.to_string(), line, message };
        let row = row.map_err(|e| format_err(e.to_string()))?;
        if row.len() != 4 {
            return Err(format_err(format!("expected 4 fields, found {}", row.len())));
        }
        let tweet_id = row[0].to_string();
        let date: CalendarDate = row[1].parse().map_err(|e| format_err(format!("{e}")))?;
        let aspect = row[2].to_lowercase();
        if tweet_id.is_empty() || aspect.is_empty() {
            return Err(format_err("empty tweet_id or aspect".into()));
        }
        let polarity: PolarityLabel = row[3].parse().map_err(format_err)?;
        out.push(LabeledAspect { tweet_id, date, aspect, polarity });
    }
    Ok(out)
}

pub fn parse_labeled(path: &Path) -> Result<Vec<LabeledAspect>, IngestError> {
    let content = read_file(path)?;
    read_labeled(&path.display().to_string(), &content)
}

pub fn write_labeled<W: Write>(out: W, labels: &[LabeledAspect]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(LABEL_HEADER)?;
    for l in labels {
        w.write_record([l.tweet_id.as_str(), &l.date.to_string(), &l.aspect, l.polarity.as_str()])?;
    }
    w.flush()?;
    Ok(())
}
