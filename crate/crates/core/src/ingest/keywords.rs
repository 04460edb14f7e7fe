use std::collections::{HashMap, HashSet};
use std::io::Write;

use serde::Serialize;

use super::TweetRecord;

/// Splits text into lowercase tokens.
///
/// Rules, in order: whitespace split; tokens that look like URLs are
/// dropped; each token is lowercased and stripped of leading and trailing
/// non-alphanumeric characters (so `#Stocks!` becomes `stocks`, while
/// `s&p` and `don't` keep their inner punctuation). Empty tokens vanish.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .filter(|t| !is_url(t))
        .filter_map(|t| {
            let token = t.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase();
            (!token.is_empty()).then_some(token)
        })
        .collect()
}

fn is_url(token: &str) -> bool {
    let lower = token.to_ascii_lowercase();
    lower.starts_with("http://") || lower.starts_with("https://") || lower.starts_with("www.")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KeywordFrequency {
    pub keyword: String,
    /// Number of tweets containing the keyword at least once.
    pub tweet_count: usize,
}

/// Document frequency of every token, keeping those seen in at least
/// `min_count` tweets. Sorted by count descending, then keyword.
pub fn keyword_frequencies(tweets: &[TweetRecord], min_count: usize) -> Vec<KeywordFrequency> {
    let mut counts: HashMap<String, usize> = HashMap::new();
    for tweet in tweets {
        let distinct: HashSet<String> = tokenize(&tweet.text).into_iter().collect();
        for token in distinct {
            *counts.entry(token).or_default() += 1;
        }
    }
    let mut out: Vec<KeywordFrequency> = counts
        .into_iter()
        .filter(|&(_, c)| c >= min_count && c > 0)
        .map(|(keyword, tweet_count)| KeywordFrequency { keyword, tweet_count })
        .collect();
    out.sort_by(|a, b| b.tweet_count.cmp(&a.tweet_count).then_with(|| a.keyword.cmp(&b.keyword)));
    out
}

pub fn write_keywords<W: Write>(out: W, keywords: &[KeywordFrequency]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["keyword", "tweet_count"])?;
    for k in keywords {
        w.write_record([k.keyword.as_str(), &k.tweet_count.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{TimeZone, Utc};

    fn tweet(id: usize, text: &str) -> TweetRecord {
        TweetRecord {
            id: id.to_string(),
            timestamp: Utc.with_ymd_and_hms(2022, 10, 3, 12, 0, 0).unwrap(),
            text: text.to_string(),
            lang: "en".into(),
        }
    }

    #[test]
    fn tokenizer_rules() {
        assert_eq!(
            tokenize("Stocks FALL!! see https://t.co/xyz #StockMarket @cnbc S&P's"),
            vec!["stocks", "fall", "see", "stockmarket", "cnbc", "s&p's"]
        );
        assert_eq!(tokenize("  ... --- "), Vec::<String>::new());
        assert_eq!(tokenize("www.example.com inflation."), vec!["inflation"]);
    }

    #[test]
    fn counted_once_per_tweet() {
        let kws = keyword_frequencies(&[tweet(1, "stock stock market")], 0);
        assert_eq!(
            kws,
            vec![
                KeywordFrequency { keyword: "market".into(), tweet_count: 1 },
                KeywordFrequency { keyword: "stock".into(), tweet_count: 1 },
            ]
        );
    }

    #[test]
    fn threshold_filter() {
        let mut tweets: Vec<_> = (0..150).map(|i| tweet(i, "inflation is up")).collect();
        tweets.extend((150..200).map(|i| tweet(i, "tesla news")));
        let kws = keyword_frequencies(&tweets, 100);
        let names: Vec<_> = kws.iter().map(|k| k.keyword.as_str()).collect();
        assert_eq!(names, vec!["inflation", "is", "up"]);
        assert!(kws.iter().all(|k| k.tweet_count == 150));
        assert!(keyword_frequencies(&[tweet(1, "a b")], 2).is_empty());
        assert!(keyword_frequencies(&[], 0).is_empty());
    }
}
