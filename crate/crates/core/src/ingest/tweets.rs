use std::io::Write;
use std::path::Path;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use super::{read_file, IngestError, DEFAULT_MAX_MALFORMED};
use crate::calendar::CalendarDate;

#[derive(Debug, Clone, PartialEq)]
pub struct TweetRecord {
    pub id: String,
    pub timestamp: DateTime<Utc>,
    pub text: String,
    pub lang: String,
}

impl TweetRecord {
    /// UTC calendar day of the timestamp; used for daily aggregation.
    pub fn date(&self) -> CalendarDate {
        self.timestamp.date_naive().into()
    }
}

#[derive(Deserialize, Serialize)]
struct RawTweet {
    id: String,
    created_at: String,
    text: String,
    lang: String,
}

/// Parsed English tweets plus bookkeeping for what was dropped.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TweetBatch {
    pub records: Vec<TweetRecord>,
    pub lines: usize,
    pub malformed: usize,
    pub non_english: usize,
}

/// Parses JSON Lines tweets from a string. Blank lines are ignored.
pub fn parse_tweets_with_cap(source: &str, content: &str, max_malformed: f64) -> Result<TweetBatch, IngestError> {
    let mut batch = TweetBatch::default();
    for (lineno, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        batch.lines += 1;
        match parse_line(line) {
            Ok(rec) if rec.lang != "en" => batch.non_english += 1,
            Ok(rec) => batch.records.push(rec),
            Err(msg) => {
                log::warn!("{source}:{}: skipping malformed tweet: {msg}", lineno + 1);
                batch.malformed += 1;
            }
        }
    }
    if batch.lines > 0 && batch.malformed as f64 > max_malformed * batch.lines as f64 {
        return Err(IngestError::TooManyMalformed {
            path: source.to_string(),
            malformed: batch.malformed,
            total: batch.lines,
            cap: max_malformed,
        });
    }
    Ok(batch)
}

fn parse_line(line: &str) -> Result<TweetRecord, String> {
    let raw: RawTweet = serde_json::from_str(line).map_err(|e| e.to_string())?;
    if raw.id.trim().is_empty() {
        return Err("empty id".into());
    }
    if raw.text.trim().is_empty() {
        return Err("empty text".into());
    }
    let timestamp = DateTime::parse_from_rfc3339(raw.created_at.trim())
        .map_err(|e| format!("bad created_at '{}': {e}", raw.created_at))?
        .with_timezone(&Utc);
    Ok(TweetRecord { id: raw.id, timestamp, text: raw.text, lang: raw.lang.trim().to_ascii_lowercase() })
}

pub fn read_tweets(path: &Path, max_malformed: f64) -> Result<TweetBatch, IngestError> {
    let content = read_file(path)?;
    parse_tweets_with_cap(&path.display().to_string(), &content, max_malformed)
}

/// Reads a tweet file with the default malformed-line cap and returns the English records.
pub fn parse_tweets(path: &Path) -> Result<Vec<TweetRecord>, IngestError> {
    read_tweets(path, DEFAULT_MAX_MALFORMED).map(|b| b.records)
}

pub fn write_tweets<W: Write>(mut out: W, tweets: &[TweetRecord]) -> std::io::Result<()> {
    for t in tweets {
        let raw = RawTweet {
            id: t.id.clone(),
            created_at: t.timestamp.to_rfc3339_opts(SecondsFormat::AutoSi, true),
            text: t.text.clone(),
            lang: t.lang.clone(),
        };
        serde_json::to_writer(&mut out, &raw)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
