//! Pipeline configuration, orchestration and CSV/JSON report emission.

pub mod cell;
pub mod config;
pub mod emit;
pub mod pipeline;

pub use cell::{read_cells, write_cells, DependenceCell, DENOMINATOR_NEAR_ZERO, TIED_SAMPLE};
pub use config::{ConfigError, GrangerDirection, PipelineConfig, PriceInput, CONFIG_KEYS};
pub use emit::{emit_granger_table, emit_heatmap, heatmap_file_name, HeatmapStatistic};
pub use pipeline::{
    analyze, run_pipeline, select_aspects, stage_analyze, stage_keywords, stage_label, stage_report, stage_score,
    PipelineError, RunSummary, CELLS_FILE, GRANGER_FILE, KEYWORDS_FILE, LABELS_FILE, MANIFEST_FILE, SCORES_FILE,
};
