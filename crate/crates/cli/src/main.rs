use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use xfsa_core::report::{
    run_pipeline, stage_analyze, stage_keywords, stage_label, stage_report, stage_score, ConfigError, GrangerDirection,
    PipelineConfig, PipelineError, CELLS_FILE, CONFIG_KEYS, KEYWORDS_FILE, LABELS_FILE, SCORES_FILE,
};
use xfsa_core::synth::{write_fixture, FixtureSpec};

#[derive(Parser, Debug)]
#[command(
    name = "xfsa",
    version,
    about = "Lagged correlation, Granger causality and uncertainty coefficients between aspect sentiment and stock prices",
    after_long_help = format!("CONFIG FILE (TOML)\n{CONFIG_KEYS}\n\nEXIT STATUS\n  0 success (possibly with warnings), 1 config or usage error, 2 fatal input error")
)]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the seeded synthetic corpus, price files and a config into a directory.
    Fixture {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = FixtureSpec::default().seed)]
        seed: u64,
    },
    /// Count tweets containing each token (keyword hopping).
    Keywords {
        #[command(flatten)]
        common: Common,
        /// Keyword CSV to write [default: <output.dir>/keywords.csv].
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Label aspect occurrences (or import inputs.labels).
    Label {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Aggregate labels into daily per-aspect scores.
    Score {
        #[command(flatten)]
        common: Common,
        /// Label CSV to read [default: <output.dir>/labels.csv].
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute r, Granger F/p and U for every (aspect, kind, ticker) cell.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Score CSV to read [default: <output.dir>/scores.csv].
        #[arg(long)]
        scores: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write heatmaps and the Granger table from a cell file.
    Report {
        #[command(flatten)]
        common: Common,
        /// Cell CSV to read [default: <output.dir>/cells.csv].
        #[arg(long)]
        cells: Option<PathBuf>,
    },
    /// All stages in sequence, plus run_manifest.json.
    Run {
        #[command(flatten)]
        common: Common,
    },
}

/// Config file plus overrides; each flag replaces the matching config key.
#[derive(Args, Debug)]
struct Common {
    #[arg(short, long)]
    config: PathBuf,
    /// output.dir
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// ingest.min_keyword_count
    #[arg(long)]
    min_keyword_count: Option<usize>,
    /// ingest.max_malformed_fraction
    #[arg(long)]
    max_malformed_fraction: Option<f64>,
    /// label.window
    #[arg(long)]
    window: Option<usize>,
    /// score.top_n
    #[arg(long)]
    top_n: Option<usize>,
    /// score.absent_as_zero
    #[arg(long)]
    absent_as_zero: Option<bool>,
    /// analyze.lag
    #[arg(long)]
    lag: Option<usize>,
    /// analyze.pearson_threshold
    #[arg(long)]
    pearson_threshold: Option<f64>,
    /// analyze.granger_lag
    #[arg(long)]
    granger_lag: Option<usize>,
    /// analyze.granger_alpha
    #[arg(long)]
    granger_alpha: Option<f64>,
    /// analyze.granger_direction (sentiment_to_price | price_to_sentiment)
    #[arg(long)]
    granger_direction: Option<GrangerDirection>,
    /// analyze.difference
    #[arg(long)]
    difference: Option<bool>,
    /// analyze.entropy_k
    #[arg(long)]
    entropy_k: Option<usize>,
}

fn absolute(p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        std::env::current_dir().map(|d| d.join(p)).unwrap_or_else(|_| p.to_path_buf())
    }
}

impl Common {
    fn config(&self) -> Result<PipelineConfig, ConfigError> {
        let mut cfg = PipelineConfig::load(&self.config)?;
        if let Some(d) = &self.output_dir {
            cfg.output.dir = absolute(d);
        }
        macro_rules! set {
            ($($flag:ident => $($field:ident).+),* $(,)?) => {
                $(if let Some(v) = self.$flag.clone() { cfg.$($field).+ = v; })*
            };
        }
        set!(
            seed => seed,
            min_keyword_count => ingest.min_keyword_count,
            max_malformed_fraction => ingest.max_malformed_fraction,
            window => label.window,
            top_n => score.top_n,
            absent_as_zero => score.absent_as_zero,
            lag => analyze.lag,
            pearson_threshold => analyze.pearson_threshold,
            granger_lag => analyze.granger_lag,
            granger_alpha => analyze.granger_alpha,
            granger_direction => analyze.granger_direction,
            difference => analyze.difference,
            entropy_k => analyze.entropy_k,
        );
        cfg.validate()?;
        Ok(cfg)
    }
}

fn or_default(given: &Option<PathBuf>, cfg: &PipelineConfig, name: &str) -> PathBuf {
    given.as_deref().map(absolute).unwrap_or_else(|| cfg.output_dir().join(name))
}

fn run(command: Command) -> Result<(), PipelineError> {
    match command {
        Command::Fixture { out, seed } => {
            let spec = FixtureSpec { seed, ..FixtureSpec::default() };
            let fx = write_fixture(&out, &spec).map_err(|source| PipelineError::Io { path: out.clone(), source })?;
            println!(
                "wrote {} tweets, {} price files and config.toml to {}",
                fx.tweets.len(),
                fx.prices.len(),
                out.display()
            );
            println!("planted link: {} {} -> {}", spec.planted_aspect, spec.planted_kind(), spec.planted_ticker);
        }
        Command::Keywords { common, out } => {
            let cfg = common.config()?;
            let out = or_default(&out, &cfg, KEYWORDS_FILE);
            let kw = stage_keywords(&cfg, &out)?;
            println!("{} keywords -> {}", kw.len(), out.display());
        }
        Command::Label { common, out } => {
            let cfg = common.config()?;
            let out = or_default(&out, &cfg, LABELS_FILE);
            let labels = stage_label(&cfg, &out)?;
            println!("{} aspect labels -> {}", labels.len(), out.display());
        }
        Command::Score { common, labels, out } => {
            let cfg = common.config()?;
            let labels = or_default(&labels, &cfg, LABELS_FILE);
            let out = or_default(&out, &cfg, SCORES_FILE);
            let counts = stage_score(&labels, &out)?;
            println!("{} aspect-days -> {}", counts.len(), out.display());
        }
        Command::Analyze { common, scores, out } => {
            let cfg = common.config()?;
            let scores = or_default(&scores, &cfg, SCORES_FILE);
            let out = or_default(&out, &cfg, CELLS_FILE);
            let cells = stage_analyze(&cfg, &scores, &out)?;
            println!("{} cells -> {}", cells.len(), out.display());
        }
        Command::Report { common, cells } => {
            let cfg = common.config()?;
            let cells = or_default(&cells, &cfg, CELLS_FILE);
            let written = stage_report(&cells, &cfg.output_dir())?;
            println!("{} report files -> {}", written.len(), cfg.output_dir().display());
        }
        Command::Run { common } => {
            let cfg = common.config()?;
            let summary = run_pipeline(&cfg)?;
            let causal = summary.cells.iter().filter(|c| c.granger_causal == Some(true)).count();
            let significant = summary.cells.iter().filter(|c| c.r_significant == Some(true)).count();
            println!(
                "{} cells, {significant} with |r| > {}, {causal} Granger-causal at alpha {} -> {}",
                summary.cells.len(),
                cfg.analyze.pearson_threshold,
                cfg.analyze.granger_alpha,
                cfg.output_dir().display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
