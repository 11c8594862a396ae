use std::path::Path;

use super::{emit_svg, write_json, write_results_file, FitSummary, ResultRow};
use crate::error::{Error, Result};
use crate::scenarios::ScenarioResult;

pub const RECORDS_FILE: &str = "records.csv";
pub const FIT_FILE: &str = "fit.json";
pub const PLOT_FILE: &str = "scatter.svg";

/// Write the files of a scenario run into `out_dir`, creating it if needed.
/// The plot uses the run's fit transform for both axes.
pub fn write_run(result: &ScenarioResult, out_dir: &Path, plot: bool) -> Result<()> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let rows: Vec<ResultRow> = result
        .records
        .iter()
        .cloned()
        .map(ResultRow::Scored)
        .chain(result.skipped.iter().cloned().map(ResultRow::Skipped))
        .collect();
    write_results_file(&out_dir.join(RECORDS_FILE), &rows)?;
    write_json(&out_dir.join(FIT_FILE), &FitSummary::from_result(result))?;
    if plot {
        emit_svg(
            &result.records,
            &result.fits,
            result.theoretical_line,
            result.config.transform,
            &out_dir.join(PLOT_FILE),
        )?;
    }
    Ok(())
}
