//! File ingestion: tweets, closing prices, aspect lexicons and externally
//! produced aspect labels, plus keyword counting for search expansion.

mod keywords;
mod labels;
mod lexicon;
mod prices;
mod tweets;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use keywords::{keyword_frequencies, tokenize, write_keywords, KeywordFrequency};
pub use labels::{parse_labeled, read_labeled, write_labeled, LabeledAspect};
pub use lexicon::{parse_lexicon_text, AspectLexicon, DEFAULT_ASPECTS};
pub use prices::{parse_prices, read_prices, write_prices, PRICE_HEADER};
pub use tweets::{parse_tweets, parse_tweets_with_cap, read_tweets, write_tweets, TweetBatch, TweetRecord};

/// Default share of malformed tweet lines tolerated before parsing fails.
pub const DEFAULT_MAX_MALFORMED: f64 = 0.10;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),
    #[error("{path}: {line}: {message}")]
    Format { path: String, line: usize, message: String },
    #[error("{path}: {malformed} of {total} lines malformed (cap {cap})")]
    TooManyMalformed { path: String, malformed: usize, total: usize, cap: f64 },
    #[error("{path}: header mismatch: {message}")]
    HeaderMismatch { path: String, message: String },
    #[error("{path}: no usable rows")]
    EmptySeries { path: String },
    #[error("lexicon: {0}")]
    Lexicon(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
}

pub(crate) fn read_file(path: &Path) -> Result<String, IngestError> {
    std::fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            IngestError::FileNotFound(path.to_path_buf())
        } else {
            IngestError::Io { path: path.display().to_string(), source: e }
        }
    })
}
