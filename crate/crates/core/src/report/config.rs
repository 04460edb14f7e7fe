//! Pipeline configuration, read from a TOML file with one table per stage.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::DEFAULT_MAX_MALFORMED;
use crate::labeler::DEFAULT_WINDOW;
use crate::stats::entropy::{DEFAULT_K, MAX_K};
use crate::stats::granger::{DEFAULT_ALPHA, DEFAULT_LAG};
use crate::stats::pearson::DEFAULT_THRESHOLD;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{key}: file not found: {path}")]
    MissingFile { key: String, path: PathBuf },
    #[error("{key}: {message}")]
    Invalid { key: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub seed: u64,
    pub inputs: InputsConfig,
    #[serde(default)]
    pub ingest: IngestConfig,
    #[serde(default)]
    pub label: LabelConfig,
    #[serde(default)]
    pub score: ScoreConfig,
    #[serde(default)]
    pub analyze: AnalyzeConfig,
    #[serde(default)]
    pub output: OutputConfig,
    /// Directory that relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputsConfig {
    /// JSON Lines tweet file. Required unless `labels` is given.
    pub tweets: Option<PathBuf>,
    /// Externally produced `tweet_id,date,aspect,polarity` CSV; replaces the built-in labeler.
    pub labels: Option<PathBuf>,
    /// Aspect lexicon; the bundled 20-aspect list when absent.
    pub aspects: Option<PathBuf>,
    pub positive_terms: Option<PathBuf>,
    pub negative_terms: Option<PathBuf>,
    /// One trading date per line; the union of the price files' dates when absent.
    pub calendar: Option<PathBuf>,
    #[serde(default)]
    pub prices: Vec<PriceInput>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriceInput {
    pub ticker: String,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IngestConfig {
    pub min_keyword_count: usize,
    pub max_malformed_fraction: f64,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig { min_keyword_count: 100, max_malformed_fraction: DEFAULT_MAX_MALFORMED }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LabelConfig {
    pub window: usize,
}

impl Default for LabelConfig {
    fn default() -> Self {
        LabelConfig { window: DEFAULT_WINDOW }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScoreConfig {
    pub top_n: usize,
    /// Treat trading days without labels as zero counts (absolute kinds only).
    pub absent_as_zero: bool,
}

impl Default for ScoreConfig {
    fn default() -> Self {
        ScoreConfig { top_n: 20, absent_as_zero: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrangerDirection {
    /// Does lagged sentiment help predict the price?
    SentimentToPrice,
    /// Does the lagged price help predict sentiment?
    PriceToSentiment,
}

impl std::str::FromStr for GrangerDirection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sentiment_to_price" => Ok(GrangerDirection::SentimentToPrice),
            "price_to_sentiment" => Ok(GrangerDirection::PriceToSentiment),
            _ => Err(format!("unknown direction '{s}' (sentiment_to_price | price_to_sentiment)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalyzeConfig {
    pub lag: usize,
    pub pearson_threshold: f64,
    pub granger_lag: usize,
    pub granger_alpha: f64,
    pub granger_direction: GrangerDirection,
    /// Run the Granger test on first differences instead of levels.
    pub difference: bool,
    pub entropy_k: usize,
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        AnalyzeConfig {
            lag: 1,
            pearson_threshold: DEFAULT_THRESHOLD,
            granger_lag: DEFAULT_LAG,
            granger_alpha: DEFAULT_ALPHA,
            granger_direction: GrangerDirection::SentimentToPrice,
            difference: false,
            entropy_k: DEFAULT_K,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: PathBuf::from("out") }
    }
}

/// Every config key with its default and meaning, for `--help`.
pub const CONFIG_KEYS: &str = "\
seed = 0                          seed recorded in the manifest and used by `fixture`
[inputs]
tweets = PATH                     JSON Lines: id, created_at, text, lang (required unless labels is set)
labels = PATH                     CSV tweet_id,date,aspect,polarity; skips the built-in labeler
aspects = PATH                    aspect lexicon, one per line, # comments (default: bundled 20 aspects)
positive_terms = PATH             polarity terms for the built-in labeler (default: bundled list)
negative_terms = PATH
calendar = PATH                   trading dates YYYY-MM-DD, one per line (default: union of price dates)
[[inputs.prices]]                 repeat per ticker, in report column order
ticker = NAME
path = PATH                       Date,Open,High,Low,Close,Adj Close,Volume CSV
[ingest]
min_keyword_count = 100           keyword-frequency threshold (tweets containing the token)
max_malformed_fraction = 0.1      fatal when more tweet lines than this fraction are malformed
[label]
window = 5                        tokens either side of an aspect searched for polarity terms
[score]
top_n = 20                        aspects kept, by total label frequency
absent_as_zero = false            unlabelled trading days count as 0 for fp/fn
[analyze]
lag = 1                           trading days between sentiment and price for r and U
pearson_threshold = 0.4           |r| strictly above this is significant
granger_lag = 1                   lag order q of the Granger regressions
granger_alpha = 0.05              causal when p < alpha
granger_direction = \"sentiment_to_price\"   or \"price_to_sentiment\"
difference = false                Granger test on first differences
entropy_k = 3                     neighbour order of the entropy estimator (1..=20)
[output]
dir = \"out\"                       output directory
Relative paths are resolved against the config file's directory.";

impl PipelineConfig {
    /// Minimal config rooted at `base_dir`; callers fill in the inputs.
    pub fn new(base_dir: impl Into<PathBuf>) -> Self {
        PipelineConfig {
            seed: 0,
            inputs: InputsConfig {
                tweets: None,
                labels: None,
                aspects: None,
                positive_terms: None,
                negative_terms: None,
                calendar: None,
                prices: Vec::new(),
            },
            ingest: IngestConfig::default(),
            label: LabelConfig::default(),
            score: ScoreConfig::default(),
            analyze: AnalyzeConfig::default(),
            output: OutputConfig::default(),
            base_dir: base_dir.into(),
        }
    }

    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let mut cfg: PipelineConfig = toml::from_str(text)
            .map_err(|e| ConfigError::Parse { path: base_dir.to_path_buf(), message: e.to_string() })?;
        cfg.base_dir = base_dir.to_path_buf();
        Ok(cfg)
    }

    /// Reads a config file without validating it, so CLI overrides can be applied first.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml_str(&text, &base).map_err(|e| match e {
            ConfigError::Parse { message, .. } => ConfigError::Parse { path: path.to_path_buf(), message },
            other => other,
        })
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        self.resolve(&self.output.dir)
    }

    pub fn tickers(&self) -> Vec<String> {
        self.inputs.prices.iter().map(|p| p.ticker.clone()).collect()
    }

    /// Checks that referenced files exist and numeric parameters are in range.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |key: &str, message: String| Err(ConfigError::Invalid { key: key.into(), message });
        let exists = |key: &str, p: &Option<PathBuf>| -> Result<(), ConfigError> {
            if let Some(p) = p {
                let full = self.resolve(p);
                if !full.is_file() {
                    return Err(ConfigError::MissingFile { key: key.into(), path: full });
                }
            }
            Ok(())
        };
        let i = &self.inputs;
        if i.tweets.is_none() && i.labels.is_none() {
            return invalid("inputs.tweets", "either inputs.tweets or inputs.labels is required".into());
        }
        exists("inputs.tweets", &i.tweets)?;
        exists("inputs.labels", &i.labels)?;
        exists("inputs.aspects", &i.aspects)?;
        exists("inputs.positive_terms", &i.positive_terms)?;
        exists("inputs.negative_terms", &i.negative_terms)?;
        exists("inputs.calendar", &i.calendar)?;
        if i.positive_terms.is_some() != i.negative_terms.is_some() {
            return invalid("inputs.positive_terms", "positive_terms and negative_terms must be given together".into());
        }
        if i.prices.is_empty() {
            return invalid("inputs.prices", "at least one price file is required".into());
        }
        let mut seen = std::collections::HashSet::new();
        for p in &i.prices {
            if p.ticker.trim().is_empty() || !seen.insert(p.ticker.as_str()) {
                return invalid("inputs.prices", format!("empty or duplicate ticker '{}'", p.ticker));
            }
            exists(&format!("inputs.prices.{}", p.ticker), &Some(p.path.clone()))?;
        }

        let f = self.ingest.max_malformed_fraction;
        if !(0.0..=1.0).contains(&f) {
            return invalid("ingest.max_malformed_fraction", format!("{f} outside [0, 1]"));
        }
        if self.label.window == 0 {
            return invalid("label.window", "must be at least 1".into());
        }
        if self.score.top_n == 0 {
            return invalid("score.top_n", "must be at least 1".into());
        }
        let a = &self.analyze;
        if a.lag == 0 {
            return invalid("analyze.lag", "must be at least 1".into());
        }
        if !(0.0..1.0).contains(&a.pearson_threshold) {
            return invalid("analyze.pearson_threshold", format!("{} outside [0, 1)", a.pearson_threshold));
        }
        if a.granger_lag == 0 {
            return invalid("analyze.granger_lag", "must be at least 1".into());
        }
        if !(a.granger_alpha > 0.0 && a.granger_alpha < 1.0) {
            return invalid("analyze.granger_alpha", format!("{} outside (0, 1)", a.granger_alpha));
        }
        if !(1..=MAX_K).contains(&a.entropy_k) {
            return invalid("analyze.entropy_k", format!("{} outside 1..={MAX_K}", a.entropy_k));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_missing_tables() {
        let cfg = PipelineConfig::from_toml_str(
            "[inputs]\ntweets = \"t.jsonl\"\n[[inputs.prices]]\nticker = \"NEE\"\npath = \"nee.csv\"\n",
            Path::new("/data"),
        )
        .unwrap();
        assert_eq!(cfg.analyze, AnalyzeConfig::default());
        assert_eq!(cfg.score.top_n, 20);
        assert_eq!(cfg.resolve(Path::new("nee.csv")), PathBuf::from("/data/nee.csv"));
        assert_eq!(cfg.output_dir(), PathBuf::from("/data/out"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = PipelineConfig::from_toml_str("[inputs]\ntweets = \"a\"\n[analyze]\nlags = 2\n", Path::new("."));
        assert!(matches!(err, Err(ConfigError::Parse { .. })));
    }

    #[test]
    fn missing_price_file_is_named() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("t.jsonl"), "").unwrap();
        let cfg = PipelineConfig::from_toml_str(
            "[inputs]\ntweets = \"t.jsonl\"\n[[inputs.prices]]\nticker = \"BP\"\npath = \"bp.csv\"\n",
            dir.path(),
        )
        .unwrap();
        match cfg.validate() {
            Err(ConfigError::MissingFile { path, .. }) => assert!(path.ends_with("bp.csv")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ranges_are_checked() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("t.jsonl"), "").unwrap();
        std::fs::write(dir.path().join("p.csv"), "").unwrap();
        let mut cfg = PipelineConfig::new(dir.path());
        cfg.inputs.tweets = Some("t.jsonl".into());
        cfg.inputs.prices.push(PriceInput { ticker: "X".into(), path: "p.csv".into() });
        cfg.validate().unwrap();
        cfg.analyze.entropy_k = 21;
        assert!(matches!(cfg.validate(), Err(ConfigError::Invalid { key, .. }) if key == "analyze.entropy_k"));
        cfg.analyze.entropy_k = 3;
        cfg.analyze.granger_alpha = 1.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn direction_parses() {
        assert_eq!("price_to_sentiment".parse(), Ok(GrangerDirection::PriceToSentiment));
        assert!("both".parse::<GrangerDirection>().is_err());
    }
}
