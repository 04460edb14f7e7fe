//! Per-occurrence aspect polarity labeling.
//!
//! [`AspectLabeler`] is the contract any aspect-based sentiment model must
//! meet to feed the pipeline. [`LexiconWindowLabeler`] is a deterministic
//! baseline that votes with positive/negative term lists in a token window.

use std::collections::BTreeSet;
use std::path::Path;

use crate::ingest::{tokenize, AspectLexicon, IngestError, LabeledAspect, TweetRecord};
use crate::series::PolarityLabel;

pub const DEFAULT_POSITIVE_TERMS: &str = include_str!("../assets/positive_terms.txt");
pub const DEFAULT_NEGATIVE_TERMS: &str = include_str!("../assets/negative_terms.txt");
pub const DEFAULT_WINDOW: usize = 5;

pub trait AspectLabeler {
    /// One `(aspect, polarity)` per aspect occurrence in `text`, in text order.
    fn label(&self, text: &str, aspects: &AspectLexicon) -> Vec<(String, PolarityLabel)>;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarityLexicon {
    positive: BTreeSet<String>,
    negative: BTreeSet<String>,
}

impl PolarityLexicon {
    pub fn new<P, N>(positive: P, negative: N) -> Result<Self, IngestError>
    where
        P: IntoIterator,
        P::Item: AsRef<str>,
        N: IntoIterator,
        N::Item: AsRef<str>,
    {
        let norm = |s: &str| s.trim().to_lowercase();
        let positive: BTreeSet<String> =
            positive.into_iter().map(|s| norm(s.as_ref())).filter(|s| !s.is_empty()).collect();
        let negative: BTreeSet<String> =
            negative.into_iter().map(|s| norm(s.as_ref())).filter(|s| !s.is_empty()).collect();
        if positive.is_empty() || negative.is_empty() {
            return Err(IngestError::Lexicon("polarity term lists must be non-empty".into()));
        }
        if let Some(both) = positive.intersection(&negative).next() {
            return Err(IngestError::Lexicon(format!("'{both}' is both positive and negative")));
        }
        Ok(PolarityLexicon { positive, negative })
    }

    /// Parses two one-term-per-line lists (`#` comments allowed).
    pub fn from_texts(positive: &str, negative: &str) -> Result<Self, IngestError> {
        let terms = |s: &str| -> Vec<String> {
            s.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).map(String::from).collect()
        };
        Self::new(terms(positive), terms(negative))
    }

    pub fn load(positive: &Path, negative: &Path) -> Result<Self, IngestError> {
        Self::from_texts(&crate::ingest::read_file(positive)?, &crate::ingest::read_file(negative)?)
    }

    pub fn default_terms() -> Self {
        Self::from_texts(DEFAULT_POSITIVE_TERMS, DEFAULT_NEGATIVE_TERMS).expect("bundled polarity lists are valid")
    }

    pub fn is_positive(&self, token: &str) -> bool {
        self.positive.contains(token)
    }

    pub fn is_negative(&self, token: &str) -> bool {
        self.negative.contains(token)
    }
}

#[derive(Debug, Clone)]
pub struct LexiconWindowLabeler {
    pub polarity: PolarityLexicon,
    /// Tokens inspected on each side of an aspect occurrence.
    pub window: usize,
}

impl LexiconWindowLabeler {
    pub fn new(polarity: PolarityLexicon, window: usize) -> Self {
        assert!(window >= 1, "window must be at least 1");
        LexiconWindowLabeler { polarity, window }
    }
}

impl Default for LexiconWindowLabeler {
    fn default() -> Self {
        Self::new(PolarityLexicon::default_terms(), DEFAULT_WINDOW)
    }
}

impl AspectLabeler for LexiconWindowLabeler {
    fn label(&self, text: &str, aspects: &AspectLexicon) -> Vec<(String, PolarityLabel)> {
        lexicon_window_label(&tokenize(text), aspects, &self.polarity, self.window)
    }
}

/// Labels every aspect occurrence in an already tokenized text.
///
/// Positive and negative terms within `window` tokens either side of the
/// occurrence are counted; the majority wins and a tie is `Neutral`.
pub fn lexicon_window_label(
    tokens: &[String],
    aspects: &AspectLexicon,
    pol: &PolarityLexicon,
    window: usize,
) -> Vec<(String, PolarityLabel)> {
    let mut hits: Vec<(usize, usize)> = Vec::new();
    for (ai, seq) in aspects.token_sequences().iter().enumerate() {
        if seq.len() > tokens.len() {
            continue;
        }
        for start in 0..=tokens.len() - seq.len() {
            if tokens[start..start + seq.len()] == seq[..] {
                hits.push((start, ai));
            }
        }
    }
    hits.sort_unstable();

    let names = aspects.token_sequences();
    hits.into_iter()
        .map(|(start, ai)| {
            let end = start + names[ai].len();
            let before = &tokens[start.saturating_sub(window)..start];
            let after = &tokens[end..(end + window).min(tokens.len())];
            let (mut pos, mut neg) = (0usize, 0usize);
            for t in before.iter().chain(after) {
                if pol.is_positive(t) {
                    pos += 1;
                } else if pol.is_negative(t) {
                    neg += 1;
                }
            }
            let label = match pos.cmp(&neg) {
                std::cmp::Ordering::Greater => PolarityLabel::Positive,
                std::cmp::Ordering::Less => PolarityLabel::Negative,
                std::cmp::Ordering::Equal => PolarityLabel::Neutral,
            };
            (names[ai].join(" "), label)
        })
        .collect()
}

/// Labels a whole corpus, tagging each label with the tweet's UTC date.
/// Output order is tweet order, then occurrence order within the tweet.
pub fn label_corpus<L>(tweets: &[TweetRecord], labeler: &L, aspects: &AspectLexicon) -> Vec<LabeledAspect>
where
    L: AspectLabeler + Sync,
{
    let per_tweet = |t: &TweetRecord| -> Vec<LabeledAspect> {
        labeler
            .label(&t.text, aspects)
            .into_iter()
            .map(|(aspect, polarity)| LabeledAspect { tweet_id: t.id.clone(), date: t.date(), aspect, polarity })
            .collect()
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let nested: Vec<Vec<LabeledAspect>> = tweets.par_iter().map(per_tweet).collect();
        nested.into_iter().flatten().collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        tweets.iter().flat_map(per_tweet).collect()
    }
}
