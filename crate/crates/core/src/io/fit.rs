use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::TransformKind;
use crate::scenarios::ScenarioResult;
use crate::stats::TrendFit;

/// Label used for fits of files not produced by a scenario run.
pub const EXTERNAL_SCENARIO: &str = "external";

/// Serialized form of one [`TrendFit`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub scenario: String,
    pub group: String,
    pub seed: Option<u64>,
    pub transform: TransformKind,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
    pub theoretical_slope: Option<f64>,
    pub theorem_bound: Option<f64>,
}

impl FitSummary {
    pub fn new(scenario: impl Into<String>, group: impl Into<String>, seed: Option<u64>, fit: &TrendFit) -> Self {
        FitSummary {
            scenario: scenario.into(),
            group: group.into(),
            seed,
            transform: fit.transform,
            slope: fit.slope,
            intercept: fit.intercept,
            r_squared: fit.r_squared,
            n_points: fit.n_points,
            theoretical_slope: None,
            theorem_bound: None,
        }
    }

    pub fn to_fit(&self) -> TrendFit {
        TrendFit {
            transform: self.transform,
            slope: self.slope,
            intercept: self.intercept,
            r_squared: self.r_squared,
            n_points: self.n_points,
        }
    }

    /// One summary per fitted group of a scenario run.
    pub fn from_result(result: &ScenarioResult) -> Vec<FitSummary> {
        result
            .fits
            .iter()
            .map(|g| FitSummary {
                theoretical_slope: result.theoretical_line.map(|(slope, _)| slope),
                theorem_bound: result.bound,
                ..FitSummary::new(result.kind.name(), g.group.clone(), Some(result.seed), &g.fit)
            })
            .collect()
    }
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Config(e.to_string()))?;
    text.push('\n');
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}
