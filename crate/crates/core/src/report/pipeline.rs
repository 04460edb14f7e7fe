//! Stage functions and the end-to-end run.
//!
//! Each stage reads the previous stage's file and writes its own, so the CLI
//! can run them one at a time; [`run_pipeline`] chains them over the output
//! directory.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::cell::{read_cells, write_cells, DependenceCell, DENOMINATOR_NEAR_ZERO, TIED_SAMPLE};
use super::config::{AnalyzeConfig, ConfigError, GrangerDirection, PipelineConfig};
use super::emit::{axes, emit_granger_table, emit_heatmap, heatmap_file_name, HeatmapStatistic};
use crate::calendar::{CalendarDate, TradingCalendar};
use crate::ingest::{
    keyword_frequencies, parse_labeled, parse_lexicon_text, parse_prices, read_labeled, read_tweets, write_keywords,
    write_labeled, AspectLexicon, IngestError, KeywordFrequency, LabeledAspect, TweetBatch, DEFAULT_ASPECTS,
};
use crate::labeler::{label_corpus, LexiconWindowLabeler, PolarityLexicon};
use crate::scores::{
    aggregate_daily, aspect_totals, read_scores, score_series, write_scores, AspectDayCount, ScoreFileError,
};
use crate::series::{align_lagged, AlignError, PriceSeries, ScoreKind, SentimentSeries};
use crate::stats::entropy::{uncertainty_coefficient_xy, DEFAULT_MIN_ENTROPY};
use crate::stats::granger::{difference, granger_causes_partial};
use crate::stats::pearson::correlate;

pub const KEYWORDS_FILE: &str = "keywords.csv";
pub const LABELS_FILE: &str = "labels.csv";
pub const SCORES_FILE: &str = "scores.csv";
pub const CELLS_FILE: &str = "cells.csv";
pub const GRANGER_FILE: &str = "granger.csv";
pub const MANIFEST_FILE: &str = "run_manifest.json";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("{path}: {source}")]
    Scores { path: PathBuf, source: ScoreFileError },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("calendar: {0}")]
    Calendar(String),
}

impl PipelineError {
    /// Process exit status: 1 for configuration problems, 2 for everything fatal after that.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 1,
            _ => 2,
        }
    }
}

type Result<T> = std::result::Result<T, PipelineError>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io { path: path.to_path_buf(), source }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    File::create(path).map(BufWriter::new).map_err(io_err(path))
}

fn write_csv_file(
    path: &Path,
    f: impl FnOnce(&mut BufWriter<File>) -> std::result::Result<(), csv::Error>,
) -> Result<()> {
    let mut w = create(path)?;
    f(&mut w).map_err(|source| PipelineError::Csv { path: path.to_path_buf(), source })?;
    w.flush().map_err(io_err(path))
}

pub fn load_lexicon(cfg: &PipelineConfig) -> Result<AspectLexicon> {
    Ok(match &cfg.inputs.aspects {
        Some(p) => AspectLexicon::load(&cfg.resolve(p))?,
        None => parse_lexicon_text(DEFAULT_ASPECTS)?,
    })
}

pub fn load_labeler(cfg: &PipelineConfig) -> Result<LexiconWindowLabeler> {
    let polarity = match (&cfg.inputs.positive_terms, &cfg.inputs.negative_terms) {
        (Some(p), Some(n)) => PolarityLexicon::load(&cfg.resolve(p), &cfg.resolve(n))?,
        _ => PolarityLexicon::default_terms(),
    };
    Ok(LexiconWindowLabeler::new(polarity, cfg.label.window))
}

pub fn load_prices(cfg: &PipelineConfig) -> Result<Vec<PriceSeries>> {
    cfg.inputs
        .prices
        .iter()
        .map(|p| parse_prices(&cfg.resolve(&p.path), &p.ticker).map_err(PipelineError::from))
        .collect()
}

/// Trading dates, one `YYYY-MM-DD` per line; blank and `#` lines are skipped.
pub fn parse_calendar_text(source: &str, content: &str) -> std::result::Result<TradingCalendar, IngestError> {
    let mut days = Vec::new();
    for (i, line) in content.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let d: CalendarDate = line.parse().map_err(|e| IngestError::Format {
            path: source.to_string(),
            line: i + 1,
            message: format!("{e}"),
        })?;
        days.push(d);
    }
    TradingCalendar::new(days).map_err(|_| IngestError::EmptySeries { path: source.to_string() })
}

/// The configured calendar, or the union of all price dates. Price days
/// outside a supplied calendar are dropped with a warning.
pub fn load_calendar(cfg: &PipelineConfig, prices: &mut [PriceSeries]) -> Result<TradingCalendar> {
    match &cfg.inputs.calendar {
        Some(p) => {
            let path = cfg.resolve(p);
            let content = fs::read_to_string(&path).map_err(io_err(&path))?;
            let cal = parse_calendar_text(&path.display().to_string(), &content)?;
            for series in prices.iter_mut() {
                let outside = series.dates().filter(|&d| !cal.contains(d)).count();
                if outside > 0 {
                    log::warn!("{}: {outside} price days are not in the trading calendar; dropped", series.ticker());
                    let kept: Vec<_> =
                        series.values().iter().filter(|(d, _)| cal.contains(**d)).map(|(&d, &v)| (d, v)).collect();
                    *series = PriceSeries::new(series.ticker().to_string(), kept)
                        .map_err(|e| PipelineError::Calendar(e.to_string()))?;
                }
            }
            Ok(cal)
        }
        None => TradingCalendar::new(prices.iter().flat_map(|p| p.dates().collect::<Vec<_>>()))
            .map_err(|e| PipelineError::Calendar(e.to_string())),
    }
}

fn tweets_path(cfg: &PipelineConfig) -> Result<PathBuf> {
    cfg.inputs.tweets.as_ref().map(|p| cfg.resolve(p)).ok_or_else(|| {
        ConfigError::Invalid { key: "inputs.tweets".into(), message: "required by this stage".into() }.into()
    })
}

/// Counts tweets containing each token and writes those at or above `ingest.min_keyword_count`.
pub fn stage_keywords(cfg: &PipelineConfig, out: &Path) -> Result<Vec<KeywordFrequency>> {
    keywords_from(cfg, &load_tweets(cfg)?, out)
}

fn load_tweets(cfg: &PipelineConfig) -> Result<TweetBatch> {
    let batch = read_tweets(&tweets_path(cfg)?, cfg.ingest.max_malformed_fraction)?;
    if batch.malformed > 0 || batch.non_english > 0 {
        log::warn!(
            "tweets: {} of {} lines malformed, {} non-English skipped",
            batch.malformed,
            batch.lines,
            batch.non_english
        );
    }
    Ok(batch)
}

fn keywords_from(cfg: &PipelineConfig, batch: &TweetBatch, out: &Path) -> Result<Vec<KeywordFrequency>> {
    let kw = keyword_frequencies(&batch.records, cfg.ingest.min_keyword_count);
    write_csv_file(out, |w| write_keywords(w, &kw))?;
    Ok(kw)
}

/// Labels aspect occurrences with the built-in labeler, or imports `inputs.labels`.
pub fn stage_label(cfg: &PipelineConfig, out: &Path) -> Result<Vec<LabeledAspect>> {
    labels_from(cfg, None, out)
}

/// `batch` is reused when the caller has already read the tweets.
fn labels_from(cfg: &PipelineConfig, batch: Option<&TweetBatch>, out: &Path) -> Result<Vec<LabeledAspect>> {
    let labels = match (&cfg.inputs.labels, batch) {
        (Some(p), _) => parse_labeled(&cfg.resolve(p))?,
        (None, Some(batch)) => label_corpus(&batch.records, &load_labeler(cfg)?, &load_lexicon(cfg)?),
        (None, None) => label_corpus(&load_tweets(cfg)?.records, &load_labeler(cfg)?, &load_lexicon(cfg)?),
    };
    write_csv_file(out, |w| write_labeled(w, &labels))?;
    Ok(labels)
}

/// Aggregates a label file into daily per-aspect counts.
pub fn stage_score(labels_path: &Path, out: &Path) -> Result<Vec<AspectDayCount>> {
    let content = fs::read_to_string(labels_path).map_err(io_err(labels_path))?;
    let labels = read_labeled(&labels_path.display().to_string(), &content)?;
    let counts = aggregate_daily(&labels);
    write_csv_file(out, |w| write_scores(w, &counts))?;
    Ok(counts)
}

/// The `top_n` most labelled lexicon aspects (ties by name), returned in lexicon order.
pub fn select_aspects(counts: &[AspectDayCount], lexicon: &AspectLexicon, top_n: usize) -> Vec<String> {
    let totals = aspect_totals(counts);
    let names = lexicon.names();
    let mut ranked: Vec<(u64, &String)> = names.iter().map(|a| (totals.get(a).copied().unwrap_or(0), a)).collect();
    ranked.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(b.1)));
    let keep: Vec<&String> = ranked.into_iter().take(top_n).map(|(_, a)| a).collect();
    names.iter().filter(|a| keep.contains(a)).cloned().collect()
}

fn align_reason(e: &AlignError) -> &'static str {
    match e {
        AlignError::EmptyAlignment => "InsufficientData",
        AlignError::ZeroLag => "InvalidParameter",
        AlignError::Calendar(_) => "NotTradingDay",
    }
}

fn compute_cell(x: &SentimentSeries, price: &PriceSeries, cal: &TradingCalendar, a: &AnalyzeConfig) -> DependenceCell {
    let mut cell = DependenceCell::empty(&x.aspect, x.kind, price.ticker());

    match align_lagged(x, price, cal, a.lag) {
        Ok(pairs) => {
            cell.n = pairs.n();
            match correlate(&pairs, a.pearson_threshold) {
                Ok(c) => {
                    cell.r = Some(c.r);
                    cell.r_significant = Some(c.significant);
                }
                Err(e) => cell.r_reason = Some(e.code().into()),
            }
            match uncertainty_coefficient_xy(&pairs.xs(), &pairs.ys(), a.entropy_k, DEFAULT_MIN_ENTROPY) {
                Ok(u) => {
                    cell.u = Some(u.u);
                    let untied = u.floored_distances == 0;
                    cell.u_valid = Some(u.valid && untied);
                    cell.mutual_information = Some(u.mutual_information);
                    cell.h_y = Some(u.h_y);
                    cell.u_floored = Some(u.floored_distances);
                    if !u.valid {
                        cell.u_reason = Some(DENOMINATOR_NEAR_ZERO.into());
                    } else if !untied {
                        cell.u_reason = Some(TIED_SAMPLE.into());
                    }
                }
                Err(e) => cell.u_reason = Some(e.code().into()),
            }
        }
        Err(e) => {
            cell.r_reason = Some(align_reason(&e).into());
            cell.u_reason = Some(align_reason(&e).into());
        }
    }

    let mut xs = x.on_calendar(cal);
    let mut ys = price.on_calendar(cal);
    if a.difference {
        xs = difference(&xs);
        ys = difference(&ys);
    }
    let (cause, effect) = match a.granger_direction {
        GrangerDirection::SentimentToPrice => (&xs, &ys),
        GrangerDirection::PriceToSentiment => (&ys, &xs),
    };
    match granger_causes_partial(cause, effect, a.granger_lag, a.granger_alpha) {
        Ok(g) => {
            cell.granger_f = Some(g.f_stat);
            cell.granger_p = Some(g.p_value);
            cell.granger_causal = Some(g.causal);
            cell.granger_n = Some(g.n_obs);
            cell.granger_perfect_fit = Some(g.perfect_fit);
        }
        Err(e) => cell.granger_reason = Some(e.code().into()),
    }
    cell
}

/// Computes every (aspect, kind, ticker) cell for the selected aspects.
/// Cells come back ordered by aspect (lexicon order), kind, then ticker (price order).
pub fn analyze(
    cfg: &PipelineConfig,
    counts: &[AspectDayCount],
    lexicon: &AspectLexicon,
    prices: &[PriceSeries],
    cal: &TradingCalendar,
) -> Vec<DependenceCell> {
    let aspects = select_aspects(counts, lexicon, cfg.score.top_n);
    let mut series = Vec::with_capacity(aspects.len() * ScoreKind::ALL.len());
    for aspect in &aspects {
        for kind in ScoreKind::ALL {
            let s = score_series(counts, aspect, kind);
            series.push(if cfg.score.absent_as_zero { s.with_absent_as_zero(cal) } else { s });
        }
    }
    if series.iter().all(|s| s.values.keys().all(|d| !cal.contains(*d))) {
        log::warn!("no labelled aspect occurrences fall on trading days; all cells will be null");
    }
    let jobs: Vec<(&SentimentSeries, &PriceSeries)> =
        series.iter().flat_map(|s| prices.iter().map(move |p| (s, p))).collect();
    let run = |&(s, p): &(&SentimentSeries, &PriceSeries)| compute_cell(s, p, cal, &cfg.analyze);
    #[cfg(feature = "parallel")]
    let cells = jobs.par_iter().map(run).collect();
    #[cfg(not(feature = "parallel"))]
    let cells = jobs.iter().map(run).collect();
    cells
}

pub fn stage_analyze(cfg: &PipelineConfig, scores_path: &Path, out: &Path) -> Result<Vec<DependenceCell>> {
    let content = fs::read_to_string(scores_path).map_err(io_err(scores_path))?;
    let counts =
        read_scores(&content).map_err(|source| PipelineError::Scores { path: scores_path.to_path_buf(), source })?;
    let lexicon = load_lexicon(cfg)?;
    let mut prices = load_prices(cfg)?;
    let cal = load_calendar(cfg, &mut prices)?;
    let cells = analyze(cfg, &counts, &lexicon, &prices, &cal);
    write_csv_file(out, |w| write_cells(w, &cells))?;
    Ok(cells)
}

/// Writes the eight heatmaps and the Granger table from a cell file; returns the written paths.
pub fn stage_report(cells_path: &Path, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let file = File::open(cells_path).map_err(io_err(cells_path))?;
    let cells = read_cells(file).map_err(|source| PipelineError::Csv { path: cells_path.to_path_buf(), source })?;
    let (aspects, tickers) = axes(&cells);
    let mut written = Vec::new();
    for stat in HeatmapStatistic::ALL {
        for kind in ScoreKind::ALL {
            let path = out_dir.join(heatmap_file_name(stat, kind));
            write_csv_file(&path, |w| emit_heatmap(w, &cells, stat, kind, &aspects, &tickers))?;
            written.push(path);
        }
    }
    let path = out_dir.join(GRANGER_FILE);
    write_csv_file(&path, |w| emit_granger_table(w, &cells, &tickers))?;
    written.push(path);
    Ok(written)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn file_digest(path: &Path) -> Result<String> {
    Ok(sha256_hex(&fs::read(path).map_err(io_err(path))?))
}

#[derive(Debug, Serialize)]
struct Manifest {
    tool: &'static str,
    version: &'static str,
    seed: u64,
    config: serde_json::Value,
    inputs: BTreeMap<String, FileEntry>,
    outputs: BTreeMap<String, String>,
}

#[derive(Debug, Serialize)]
struct FileEntry {
    path: String,
    sha256: String,
}

/// Config echo, input digests and output digests. No timestamps or absolute
/// paths, so identical runs produce identical manifests.
pub fn write_manifest(cfg: &PipelineConfig, outputs: &[PathBuf], path: &Path) -> Result<()> {
    let mut config = serde_json::to_value(cfg).expect("config serialises");
    if let Some(obj) = config.as_object_mut() {
        obj.remove("output");
    }
    let mut inputs = BTreeMap::new();
    let i = &cfg.inputs;
    let named = [
        ("tweets", &i.tweets),
        ("labels", &i.labels),
        ("aspects", &i.aspects),
        ("positive_terms", &i.positive_terms),
        ("negative_terms", &i.negative_terms),
        ("calendar", &i.calendar),
    ];
    for (role, p) in named {
        if let Some(p) = p {
            inputs.insert(
                role.to_string(),
                FileEntry { path: p.display().to_string(), sha256: file_digest(&cfg.resolve(p))? },
            );
        }
    }
    for p in &i.prices {
        inputs.insert(
            format!("prices.{}", p.ticker),
            FileEntry { path: p.path.display().to_string(), sha256: file_digest(&cfg.resolve(&p.path))? },
        );
    }
    let mut out_digests = BTreeMap::new();
    for o in outputs {
        let name = o.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        out_digests.insert(name, file_digest(o)?);
    }
    let manifest = Manifest {
        tool: "xfsa",
        version: env!("CARGO_PKG_VERSION"),
        seed: cfg.seed,
        config,
        inputs,
        outputs: out_digests,
    };
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, &manifest).expect("manifest serialises");
    w.write_all(b"\n").map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

#[derive(Debug)]
pub struct RunSummary {
    pub cells: Vec<DependenceCell>,
    pub outputs: Vec<PathBuf>,
}

/// Validates the config and runs every stage into the output directory.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<RunSummary> {
    cfg.validate()?;
    let dir = cfg.output_dir();
    fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    let mut outputs = Vec::new();
    let batch = match cfg.inputs.tweets {
        Some(_) => Some(load_tweets(cfg)?),
        None => None,
    };
    if let Some(batch) = &batch {
        let p = dir.join(KEYWORDS_FILE);
        keywords_from(cfg, batch, &p)?;
        outputs.push(p);
    }
    let labels = dir.join(LABELS_FILE);
    labels_from(cfg, batch.as_ref(), &labels)?;
    let scores = dir.join(SCORES_FILE);
    stage_score(&labels, &scores)?;
    let cells_path = dir.join(CELLS_FILE);
    let cells = stage_analyze(cfg, &scores, &cells_path)?;
    outputs.extend([labels, scores, cells_path.clone()]);
    outputs.extend(stage_report(&cells_path, &dir)?);
    let manifest = dir.join(MANIFEST_FILE);
    write_manifest(cfg, &outputs, &manifest)?;
    outputs.push(manifest);
    Ok(RunSummary { cells, outputs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::PRICE_HEADER;
    use crate::report::config::PriceInput;

    fn counts(rows: &[(&str, u64)]) -> Vec<AspectDayCount> {
        let d: CalendarDate = "2022-10-03".parse().unwrap();
        rows.iter().map(|&(a, pos)| AspectDayCount { aspect: a.into(), date: d, pos, neg: 0, neu: 0 }).collect()
    }

    #[test]
    fn top_n_by_frequency_then_name_in_lexicon_order() {
        let lex = AspectLexicon::new(["tax", "bank", "cost", "rate"]).unwrap();
        let c = counts(&[("tax", 1), ("bank", 5), ("cost", 5), ("rate", 3)]);
        assert_eq!(select_aspects(&c, &lex, 2), vec!["bank", "cost"]);
        assert_eq!(select_aspects(&c, &lex, 3), vec!["bank", "cost", "rate"]);
        // zero-frequency aspects still fill the quota, alphabetically
        assert_eq!(select_aspects(&[], &lex, 2), vec!["bank", "cost"]);
        assert_eq!(select_aspects(&c, &lex, 10).len(), 4);
    }

    #[test]
    fn calendar_file() {
        let cal = parse_calendar_text("cal", "# q4\n2022-10-03\n\n2022-10-04\n").unwrap();
        assert_eq!(cal.len(), 2);
        assert!(matches!(parse_calendar_text("cal", "2022-13-01\n"), Err(IngestError::Format { line: 1, .. })));
        assert!(parse_calendar_text("cal", "# nothing\n").is_err());
    }

    #[test]
    fn no_aspect_tweets_gives_all_null_cells() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path();
        fs::write(
            p.join("t.jsonl"),
            "{\"id\":\"1\",\"created_at\":\"2022-10-03T10:00:00Z\",\"text\":\"hello world\",\"lang\":\"en\"}\n",
        )
        .unwrap();
        let mut csv = PRICE_HEADER.join(",") + "\n";
        let cal = TradingCalendar::weekdays("2022-10-03".parse().unwrap(), "2022-12-30".parse().unwrap(), &[]).unwrap();
        for (i, d) in cal.days().iter().enumerate() {
            let v = 10.0 + i as f64;
            csv.push_str(&format!("{d},{v},{v},{v},{v},{v},0\n"));
        }
        fs::write(p.join("x.csv"), csv).unwrap();
        let mut cfg = PipelineConfig::new(p);
        cfg.inputs.tweets = Some("t.jsonl".into());
        cfg.inputs.prices.push(PriceInput { ticker: "X".into(), path: "x.csv".into() });
        let run = run_pipeline(&cfg).unwrap();
        assert_eq!(run.cells.len(), 20 * 4);
        for c in &run.cells {
            assert_eq!(c.r, None);
            assert_eq!(c.r_reason.as_deref(), Some("InsufficientData"));
            assert_eq!(c.granger_reason.as_deref(), Some("InsufficientData"));
            assert_eq!(c.u_reason.as_deref(), Some("InsufficientData"));
        }
        let heat = fs::read_to_string(p.join("out").join("heatmap_r_fp.csv")).unwrap();
        assert_eq!(heat.lines().count(), 21);
        assert_eq!(
            fs::read_to_string(p.join("out").join(GRANGER_FILE)).unwrap(),
            "ticker,aspect,kind,f_stat,p_value\n"
        );
    }

    #[test]
    fn exit_codes() {
        let cfg_err = PipelineError::Config(ConfigError::Invalid { key: "k".into(), message: "m".into() });
        assert_eq!(cfg_err.exit_code(), 1);
        assert_eq!(PipelineError::Ingest(IngestError::EmptySeries { path: "p".into() }).exit_code(), 2);
    }

    #[test]
    fn digest_is_hex_sha256() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
