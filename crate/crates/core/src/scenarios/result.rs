use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::{ScenarioConfig, ScenarioKind};
use crate::gaussian_shift::ProbitDeviation;
use crate::stats::{EvalRecord, TrendFit};

/// A grid cell whose model could not be trained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedModel {
    pub model_id: String,
    pub family: String,
    pub hyperparams: BTreeMap<String, String>,
    pub reason: String,
}

/// Trend fitted over one group of records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupFit {
    pub group: String,
    pub fit: TrendFit,
}

/// Per-model quantities beyond the two accuracies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDiagnostic {
    pub model_id: String,
    /// Mean-shift scenarios, linear models.
    pub deviation: Option<ProbitDeviation>,
    /// Covariance scenarios, linear models: `probit(acc') / probit(acc)`.
    pub probit_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub kind: ScenarioKind,
    pub seed: u64,
    pub config: ScenarioConfig,
    /// Sorted by `model_id`.
    pub records: Vec<EvalRecord>,
    /// Sorted by `model_id`.
    pub skipped: Vec<SkippedModel>,
    /// `"all"` covers every record; the other groups are scenario-specific.
    pub fits: Vec<GroupFit>,
    /// `(slope, intercept)` of the predicted probit line.
    pub theoretical_line: Option<(f64, f64)>,
    /// Deviation bound at `shift.bound_delta`.
    pub bound: Option<f64>,
    /// Sorted by `model_id`.
    pub diagnostics: Vec<ModelDiagnostic>,
    /// Adversarial scenario: the model the shift was aimed at.
    pub target: Option<String>,
    /// Covariance scenarios: max/min probit ratio over linear models
    /// exceeds 1.05.
    pub ratio_nonconstant: Option<bool>,
}

impl ScenarioResult {
    pub fn fit(&self, group: &str) -> Option<&TrendFit> {
        self.fits.iter().find(|g| g.group == group).map(|g| &g.fit)
    }

    pub fn record(&self, model_id: &str) -> Option<&EvalRecord> {
        self.records
            .binary_search_by(|r| r.model_id.as_str().cmp(model_id))
            .ok()
            .map(|i| &self.records[i])
    }

    pub fn diagnostic(&self, model_id: &str) -> Option<&ModelDiagnostic> {
        self.diagnostics
            .binary_search_by(|r| r.model_id.as_str().cmp(model_id))
            .ok()
            .map(|i| &self.diagnostics[i])
    }
}
