//! Shared machinery: task setup, grid cells, training and assembly.

use std::collections::BTreeMap;

use rand::seq::index::sample as sample_indices;
use rand::RngCore;
use rayon::prelude::*;

use super::config::ScenarioConfig;
use super::result::{GroupFit, ModelDiagnostic, ScenarioResult, SkippedModel};
use crate::error::{Error, Result};
use crate::gaussian_shift::{
    apply_shift, sample_dataset_prefix, sample_unit_sphere, GaussianTask, LabeledSample, MeanShift, ShiftSpec,
};
use crate::learners::{project, LearnerSpec, TrainedModel};
use crate::rng::derive_rng;
use crate::stats::{fit_trend, EvalRecord};

pub(crate) const TAG_MU: u64 = 1;
pub(crate) const TAG_DELTA: u64 = 2;
pub(crate) const TAG_TRAIN: u64 = 3;
pub(crate) const TAG_AUX_DIRECTION: u64 = 4;
pub(crate) const TAG_AUX_TRAIN: u64 = 5;
pub(crate) const TAG_SMALL_POSITIONS: u64 = 6;
pub(crate) const TAG_FOREST: u64 = 7;
pub(crate) const TAG_EVAL_ID: u64 = 8;
pub(crate) const TAG_EVAL_OOD: u64 = 9;
pub(crate) const TAG_EVAL_OOD_ALT: u64 = 10;

/// Isotropic task, random shift and training set for the mean-shift
/// scenarios.
#[derive(Debug, Clone)]
pub struct MeanShiftSetup {
    pub task: GaussianTask,
    pub shift: MeanShift,
    pub shifted: GaussianTask,
    /// `n_train` samples restricted to the largest `d_proj` coordinates.
    pub train: Vec<LabeledSample>,
}

/// Draws `μ`, `Δ` and the training set from the master seed.
pub fn mean_shift_setup(config: &ScenarioConfig) -> Result<MeanShiftSetup> {
    let d = config.task.d;
    let mu = sample_unit_sphere(d, &mut derive_rng(config.seed, TAG_MU, 0))?;
    let task = GaussianTask::isotropic(mu, config.task.sigma)?;
    let delta = sample_unit_sphere(d, &mut derive_rng(config.seed, TAG_DELTA, 0))?;
    let s = &config.shift;
    let shift = MeanShift::new(s.alpha, s.beta, s.gamma, delta)?;
    let shifted = apply_shift(&task, &ShiftSpec::Mean(shift.clone()))?;
    let train = sample_dataset_prefix(
        &task,
        config.data.n_train,
        max_d_proj(config),
        &mut derive_rng(config.seed, TAG_TRAIN, 0),
    )?;
    Ok(MeanShiftSetup {
        task,
        shift,
        shifted,
        train,
    })
}

/// Diagonal task and training set for the covariance scenarios.
#[derive(Debug, Clone)]
pub struct CovarianceSetup {
    pub task: GaussianTask,
    /// Coordinates carrying the small variance, ascending.
    pub small_positions: Vec<usize>,
    pub train: Vec<LabeledSample>,
}

pub fn covariance_setup(config: &ScenarioConfig) -> Result<CovarianceSetup> {
    let d = config.task.d;
    let spec = config
        .task
        .covariance
        .as_ref()
        .ok_or_else(|| Error::Config(format!("{} needs [task.covariance]", config.kind)))?;
    let mut small_positions = sample_indices(
        &mut derive_rng(config.seed, TAG_SMALL_POSITIONS, 0),
        d,
        spec.n_small,
    )
    .into_vec();
    small_positions.sort_unstable();
    let mut variances = vec![spec.large; d];
    for &j in &small_positions {
        variances[j] = spec.small;
    }
    let mu = sample_unit_sphere(d, &mut derive_rng(config.seed, TAG_MU, 0))?;
    let task = GaussianTask::diagonal(mu, variances)?;
    let train = sample_dataset_prefix(
        &task,
        config.data.n_train,
        max_d_proj(config),
        &mut derive_rng(config.seed, TAG_TRAIN, 0),
    )?;
    Ok(CovarianceSetup {
        task,
        small_positions,
        train,
    })
}

pub(crate) fn max_d_proj(config: &ScenarioConfig) -> usize {
    config.data.d_proj.iter().copied().max().unwrap_or(config.task.d)
}

/// One point of the grid: a learner, the data reduction, and extra samples.
#[derive(Debug, Clone)]
pub(crate) struct Cell {
    /// Stream index for this cell's random draws; independent of grid order
    /// for the aux dimension, so aux-free cells match across scenarios.
    pub key: u64,
    pub n_sub: usize,
    pub d_proj: usize,
    pub n_aux: usize,
    pub learner: LearnerSpec,
    pub family: &'static str,
    pub hyperparams: BTreeMap<String, String>,
}

impl Cell {
    pub fn model_id(&self) -> String {
        model_id(self.family, &self.hyperparams)
    }

    pub fn record(&self, extra: &[(&str, &str)], id: crate::stats::MetricEstimate, ood: crate::stats::MetricEstimate) -> EvalRecord {
        let mut hyperparams = self.hyperparams.clone();
        for (k, v) in extra {
            hyperparams.insert((*k).to_string(), (*v).to_string());
        }
        let mut record = EvalRecord::new(model_id(self.family, &hyperparams), self.family, id, ood);
        record.hyperparams = hyperparams;
        record
    }

    pub fn skipped(&self, extra: &[(&str, &str)], reason: String) -> SkippedModel {
        let mut hyperparams = self.hyperparams.clone();
        for (k, v) in extra {
            hyperparams.insert((*k).to_string(), (*v).to_string());
        }
        SkippedModel {
            model_id: model_id(self.family, &hyperparams),
            family: self.family.to_string(),
            hyperparams,
            reason,
        }
    }
}

fn model_id(family: &str, hyperparams: &BTreeMap<String, String>) -> String {
    let params: Vec<String> = hyperparams.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("{family}/{}", params.join(";"))
}

/// Grid cells in the order aux size, `n_sub`, `d_proj`, learner.
pub(crate) fn cells(config: &ScenarioConfig, aux_sizes: &[usize]) -> Vec<Cell> {
    let learners = config.grid.learners();
    let mut out = Vec::new();
    for &n_aux in aux_sizes {
        let mut base = 0u64;
        for &n_sub in &config.data.n_sub {
            for &d_proj in &config.data.d_proj {
                for learner in &learners {
                    let key = base | (n_aux as u64) << 32;
                    base += 1;
                    let mut learner = learner.clone();
                    if let LearnerSpec::RandomForest { seed, .. } = &mut learner {
                        *seed = derive_rng(config.seed, TAG_FOREST, key).next_u64();
                    }
                    let mut hyperparams = learner.hyperparams();
                    hyperparams.insert("n_sub".into(), n_sub.to_string());
                    hyperparams.insert("d_proj".into(), d_proj.to_string());
                    if n_aux > 0 {
                        hyperparams.insert("n_aux".into(), n_aux.to_string());
                    }
                    out.push(Cell {
                        key,
                        n_sub,
                        d_proj,
                        n_aux,
                        family: learner.family(),
                        learner,
                        hyperparams,
                    });
                }
            }
        }
    }
    out
}

/// Errors that mark a single model as skipped instead of failing the run.
fn skip_reason(err: &Error) -> Option<String> {
    match err {
        Error::NonConvergence { .. } | Error::ZeroClassifier | Error::Degenerate(_) => Some(err.to_string()),
        _ => None,
    }
}

/// Train `cell` on the first `n_sub` rows of `train` plus the first `n_aux`
/// rows of `aux`, projected to `d_proj`. Linear models are zero-padded to
/// `dim`. `Ok(Err(reason))` marks a skipped model.
pub(crate) fn train_cell(
    cell: &Cell,
    train: &[LabeledSample],
    aux: &[LabeledSample],
    dim: usize,
) -> Result<std::result::Result<TrainedModel, String>> {
    if cell.n_sub > train.len() || cell.n_aux > aux.len() {
        return Err(Error::domain("grid cell asks for more samples than were drawn"));
    }
    let data: Vec<LabeledSample> = train[..cell.n_sub]
        .iter()
        .chain(&aux[..cell.n_aux])
        .cloned()
        .collect();
    let data = project(&data, cell.d_proj)?;
    let trained = cell.learner.train(&data).and_then(|m| m.embedded(dim));
    match trained {
        Ok(model) => Ok(Ok(model)),
        Err(err) => match skip_reason(&err) {
            Some(reason) => {
                log::warn!("skipping `{}`: {reason}", cell.model_id());
                Ok(Err(reason))
            }
            None => Err(err),
        },
    }
}

/// Output of one cell: any number of records, skips and diagnostics.
#[derive(Debug, Default)]
pub(crate) struct CellOutput {
    pub records: Vec<EvalRecord>,
    pub skipped: Vec<SkippedModel>,
    pub diagnostics: Vec<ModelDiagnostic>,
}

/// Run `job` over `items` in parallel; results keep input order and the
/// first error in input order wins.
pub(crate) fn par_map<I: Sync, T: Send>(items: &[I], job: impl Fn(&I) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    items.par_iter().map(job).collect::<Vec<_>>().into_iter().collect()
}

/// Named predicate selecting the records of one fit group.
pub(crate) type Group<'a> = (String, Box<dyn Fn(&EvalRecord) -> bool + 'a>);

pub(crate) struct Assembly<'a> {
    pub config: &'a ScenarioConfig,
    pub outputs: Vec<CellOutput>,
    /// Scenario groups: name and membership test; fitted over exact records.
    pub groups: Vec<Group<'a>>,
    pub theoretical_line: Option<(f64, f64)>,
    pub bound: Option<f64>,
    pub target: Option<String>,
    pub ratio_nonconstant: Option<bool>,
}

impl Assembly<'_> {
    pub fn finish(self) -> Result<ScenarioResult> {
        let mut records = Vec::new();
        let mut skipped = Vec::new();
        let mut diagnostics = Vec::new();
        for out in self.outputs {
            records.extend(out.records);
            skipped.extend(out.skipped);
            diagnostics.extend(out.diagnostics);
        }
        records.sort_by(|a, b| a.model_id.cmp(&b.model_id));
        skipped.sort_by(|a, b| a.model_id.cmp(&b.model_id));
        diagnostics.sort_by(|a, b| a.model_id.cmp(&b.model_id));
        if records.is_empty() {
            return Err(Error::Degenerate("every model in the grid was skipped".into()));
        }
        for pair in records.windows(2) {
            if pair[0].model_id == pair[1].model_id {
                return Err(Error::Config(format!("duplicate grid entry `{}`", pair[0].model_id)));
            }
        }

        let transform = self.config.transform;
        let mut fits = Vec::new();
        let mut push_fit = |group: &str, members: Vec<EvalRecord>| match fit_trend(&members, transform) {
            Ok(fit) => fits.push(GroupFit {
                group: group.to_string(),
                fit,
            }),
            Err(err) => log::warn!("no {transform} fit for group `{group}`: {err}"),
        };
        push_fit("all", records.clone());
        for (name, member) in &self.groups {
            let group: Vec<EvalRecord> = records
                .iter()
                .filter(|r| r.is_exact() && member(r))
                .cloned()
                .collect();
            push_fit(name, group);
        }

        Ok(ScenarioResult {
            kind: self.config.kind,
            seed: self.config.seed,
            config: self.config.clone(),
            records,
            skipped,
            fits,
            theoretical_line: self.theoretical_line,
            bound: self.bound,
            diagnostics,
            target: self.target,
            ratio_nonconstant: self.ratio_nonconstant,
        })
    }
}
