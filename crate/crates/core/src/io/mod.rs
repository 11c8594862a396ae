//! File formats: TOML scenario configs, results CSV, fit summaries as JSON
//! and SVG scatter plots.

mod config;
mod fit;
mod output;
mod records;
mod svg;

pub use config::{load_config, parse_config};
pub use fit::{write_json, FitSummary, EXTERNAL_SCENARIO};
pub use records::{
    read_results, read_results_file, write_results, write_results_file, ResultRow, COLUMNS, INGEST_CONFIDENCE,
    SCHEMA_LINE, STATUS_OK,
};
pub use output::{write_run, FIT_FILE, PLOT_FILE, RECORDS_FILE};
pub use svg::{emit_svg, render_svg};
