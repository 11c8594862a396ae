//! Scenario configs as TOML.
//!
//! `kind` and `[task] d` are required; every other key falls back to the
//! defaults for the chosen kind. Unknown keys are errors.
//!
//! ```toml
//! kind = "main_trend"
//! seed = 7
//!
//! [task]
//! d = 100000
//!
//! [data]
//! n_sub = [30, 100]
//! ```

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::numerics::TransformKind;
use crate::scenarios::{CovarianceShiftKind, DiagonalSpec, ScenarioConfig, ScenarioKind};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    kind: ScenarioKind,
    seed: Option<u64>,
    transform: Option<TransformKind>,
    task: Option<RawTask>,
    #[serde(default)]
    shift: RawShift,
    #[serde(default)]
    grid: RawGrid,
    #[serde(default)]
    data: RawData,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTask {
    d: Option<usize>,
    sigma: Option<f64>,
    covariance: Option<DiagonalSpec>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawShift {
    alpha: Option<f64>,
    beta: Option<f64>,
    gamma: Option<f64>,
    bound_delta: Option<f64>,
    c: Option<f64>,
    target_index: Option<usize>,
    aux_sizes: Option<Vec<usize>>,
    aux_sigma_factor: Option<f64>,
    covariance: Option<CovarianceShiftKind>,
    s2: Option<f64>,
    kappa: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    logistic_l2_c: Option<Vec<f64>>,
    logistic_l1_c: Option<Vec<f64>>,
    ridge_alpha: Option<Vec<f64>>,
    knn_k: Option<Vec<usize>>,
    forest_trees: Option<Vec<usize>>,
    forest_max_depth: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawData {
    n_train: Option<usize>,
    n_sub: Option<Vec<usize>>,
    d_proj: Option<Vec<usize>>,
    n_test: Option<u64>,
    confidence: Option<f64>,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

/// Parse and validate a config from TOML text.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim_end().to_string()))?;
    let task = raw
        .task
        .ok_or_else(|| Error::Config("missing table `[task]` (it must set `d`)".into()))?;
    let d = task
        .d
        .ok_or_else(|| Error::Config("missing field `d` in table `[task]`".into()))?;

    let mut config = ScenarioConfig::defaults(raw.kind);
    set(&mut config.seed, raw.seed);
    set(&mut config.transform, raw.transform);
    config.task.d = d;
    set(&mut config.task.sigma, task.sigma);
    if task.covariance.is_some() {
        config.task.covariance = task.covariance;
    }

    let s = &mut config.shift;
    set(&mut s.alpha, raw.shift.alpha);
    set(&mut s.beta, raw.shift.beta);
    set(&mut s.gamma, raw.shift.gamma);
    set(&mut s.bound_delta, raw.shift.bound_delta);
    set(&mut s.c, raw.shift.c);
    if raw.shift.target_index.is_some() {
        s.target_index = raw.shift.target_index;
    }
    set(&mut s.aux_sizes, raw.shift.aux_sizes);
    set(&mut s.aux_sigma_factor, raw.shift.aux_sigma_factor);
    set(&mut s.covariance, raw.shift.covariance);
    set(&mut s.s2, raw.shift.s2);
    set(&mut s.kappa, raw.shift.kappa);

    let g = &mut config.grid;
    set(&mut g.logistic_l2_c, raw.grid.logistic_l2_c);
    set(&mut g.logistic_l1_c, raw.grid.logistic_l1_c);
    set(&mut g.ridge_alpha, raw.grid.ridge_alpha);
    set(&mut g.knn_k, raw.grid.knn_k);
    set(&mut g.forest_trees, raw.grid.forest_trees);
    if raw.grid.forest_max_depth.is_some() {
        g.forest_max_depth = raw.grid.forest_max_depth;
    }

    let data = &mut config.data;
    set(&mut data.n_train, raw.data.n_train);
    set(&mut data.n_sub, raw.data.n_sub);
    set(&mut data.d_proj, raw.data.d_proj);
    set(&mut data.n_test, raw.data.n_test);
    set(&mut data.confidence, raw.data.confidence);

    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}
