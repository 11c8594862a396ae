use super::config::{CovarianceShiftKind, ScenarioConfig, ScenarioKind};
use super::grid::{
    cells, covariance_setup, max_d_proj, mean_shift_setup, par_map, train_cell, Assembly, CellOutput, Group, MeanShiftSetup,
    TAG_AUX_DIRECTION, TAG_AUX_TRAIN, TAG_EVAL_ID, TAG_EVAL_OOD, TAG_EVAL_OOD_ALT,
};
use super::result::{ModelDiagnostic, ScenarioResult};
use crate::error::{Error, Result};
use crate::gaussian_shift::{
    apply_shift, exact_probit_margin, make_aux_task, probit_deviation, sample_dataset_prefix, theorem_bound,
    GaussianTask, LabeledSample, MeanShift, ShiftSpec,
};
use crate::learners::evaluate;
use crate::rng::derive_rng;
use crate::stats::EvalRecord;

fn expect_kind(config: &ScenarioConfig, kind: ScenarioKind) -> Result<()> {
    if config.kind != kind {
        return Err(Error::Config(format!(
            "{kind} runner given a {} config",
            config.kind
        )));
    }
    config.validate()
}

fn mean_shift_bound(config: &ScenarioConfig) -> Result<f64> {
    let s = &config.shift;
    theorem_bound(s.beta, s.gamma, config.task.sigma, config.task.d, s.bound_delta)
}

/// Trains the grid on `D`, scores linear models exactly and the rest on
/// fresh samples, and fits the probit trend over the linear models.
pub fn run_main_trend(config: &ScenarioConfig) -> Result<ScenarioResult> {
    expect_kind(config, ScenarioKind::MainTrend)?;
    mean_shift_trend(config, &mean_shift_setup(config)?, &[0], &[])
}

/// The main-trend grid restricted to the configured learners, trained on
/// `D` plus `n_aux` samples from `D''`, where `D''` has mean `μ' + βΔ̃` for
/// an independent direction `Δ̃` and noise `aux_sigma_factor·σ`.
pub fn run_more_data(config: &ScenarioConfig) -> Result<ScenarioResult> {
    expect_kind(config, ScenarioKind::MoreData)?;
    let setup = mean_shift_setup(config)?;
    let max_aux = config.shift.aux_sizes.iter().copied().max().unwrap_or(0);
    let aux = if max_aux > 0 {
        let aux_task = make_aux_task(
            &setup.shifted,
            config.shift.beta,
            config.shift.aux_sigma_factor * config.task.sigma,
            &mut derive_rng(config.seed, TAG_AUX_DIRECTION, 0),
        )?;
        sample_dataset_prefix(
            &aux_task.task,
            max_aux,
            max_d_proj(config),
            &mut derive_rng(config.seed, TAG_AUX_TRAIN, 0),
        )?
    } else {
        Vec::new()
    };
    mean_shift_trend(config, &setup, &config.shift.aux_sizes, &aux)
}

fn mean_shift_trend(
    config: &ScenarioConfig,
    setup: &MeanShiftSetup,
    aux_sizes: &[usize],
    aux: &[LabeledSample],
) -> Result<ScenarioResult> {
    let d = config.task.d;
    let grid = cells(config, aux_sizes);
    let outputs = par_map(&grid, |cell| {
        let mut out = CellOutput::default();
        let model = match train_cell(cell, &setup.train, aux, d)? {
            Ok(model) => model,
            Err(reason) => {
                out.skipped.push(cell.skipped(&[], reason));
                return Ok(out);
            }
        };
        let id = eval(config, &model, &setup.task, TAG_EVAL_ID, cell.key)?;
        let ood = eval(config, &model, &setup.shifted, TAG_EVAL_OOD, cell.key)?;
        let record = cell.record(&[], id, ood);
        if let Some(clf) = model.as_linear() {
            out.diagnostics.push(ModelDiagnostic {
                model_id: record.model_id.clone(),
                deviation: Some(probit_deviation(&setup.task, &setup.shift, clf)?),
                probit_ratio: None,
            });
        }
        out.records.push(record);
        Ok(out)
    })?;

    let mut groups: Vec<Group> = Vec::new();
    if config.kind == ScenarioKind::MoreData {
        for &n_aux in aux_sizes {
            groups.push((
                format!("aux={n_aux}"),
                Box::new(move |r: &EvalRecord| aux_of(r) == n_aux),
            ));
        }
    } else {
        groups.push(("linear".into(), Box::new(|_: &EvalRecord| true)));
    }
    Assembly {
        config,
        outputs,
        groups,
        theoretical_line: Some((setup.shift.line_slope(), 0.0)),
        bound: Some(mean_shift_bound(config)?),
        target: None,
        ratio_nonconstant: None,
    }
    .finish()
}

fn aux_of(record: &EvalRecord) -> usize {
    record
        .hyperparams
        .get("n_aux")
        .and_then(|v| v.parse().ok())
        .unwrap_or(0)
}

fn eval(
    config: &ScenarioConfig,
    model: &crate::learners::TrainedModel,
    task: &GaussianTask,
    tag: u64,
    key: u64,
) -> Result<crate::stats::MetricEstimate> {
    evaluate(
        model,
        task,
        config.data.n_test,
        &mut derive_rng(config.seed, tag, key),
        config.data.confidence,
    )
}

/// Trains the main grid, then aims `Δ = c·θ*/‖θ*‖` at one linear model θ*
/// and re-scores every model out of distribution. In-distribution
/// accuracies do not depend on `Δ` and are computed once.
pub fn run_adversarial(config: &ScenarioConfig) -> Result<ScenarioResult> {
    expect_kind(config, ScenarioKind::Adversarial)?;
    let setup = mean_shift_setup(config)?;
    let d = config.task.d;
    let grid = cells(config, &[0]);
    let trained = par_map(&grid, |cell| {
        let model = train_cell(cell, &setup.train, &[], d)?;
        let id = match &model {
            Ok(m) => Some(eval(config, m, &setup.task, TAG_EVAL_ID, cell.key)?),
            Err(_) => None,
        };
        Ok((model, id))
    })?;

    let linear: Vec<usize> = trained
        .iter()
        .enumerate()
        .filter(|(_, (m, _))| m.as_ref().is_ok_and(|m| m.as_linear().is_some()))
        .map(|(i, _)| i)
        .collect();
    if linear.is_empty() {
        return Err(Error::Degenerate("adversarial scenario needs a trained linear model".into()));
    }
    let pick = config.shift.target_index.unwrap_or(linear.len() / 2);
    let &target_cell = linear.get(pick).ok_or_else(|| {
        Error::Config(format!(
            "shift.target_index = {pick} but only {} linear models were trained",
            linear.len()
        ))
    })?;
    let target_clf = match &trained[target_cell].0 {
        Ok(m) => m.as_linear().cloned().expect("filtered to linear models"),
        Err(_) => unreachable!("filtered to trained models"),
    };
    let s = &config.shift;
    let shift = MeanShift::adversarial(s.alpha, s.beta, s.gamma, s.c, &target_clf)?;
    let shifted = apply_shift(&setup.task, &ShiftSpec::Mean(shift.clone()))?;

    let indices: Vec<usize> = (0..grid.len()).collect();
    let outputs: Vec<CellOutput> = par_map(&indices, |&i| {
        let cell = &grid[i];
        let mut out = CellOutput::default();
        let (model, id) = match &trained[i] {
            (Ok(model), Some(id)) => (model, *id),
            (Err(reason), _) => {
                out.skipped.push(cell.skipped(&[], reason.clone()));
                return Ok(out);
            }
            (Ok(_), None) => unreachable!("trained models have an ID score"),
        };
        let ood = eval(config, model, &shifted, TAG_EVAL_OOD, cell.key)?;
        let record = cell.record(&[], id, ood);
        if let Some(clf) = model.as_linear() {
            out.diagnostics.push(ModelDiagnostic {
                model_id: record.model_id.clone(),
                deviation: Some(probit_deviation(&setup.task, &shift, clf)?),
                probit_ratio: None,
            });
        }
        out.records.push(record);
        Ok(out)
    })?;

    Assembly {
        config,
        outputs,
        groups: vec![("linear".into(), Box::new(|_: &EvalRecord| true))],
        theoretical_line: Some((shift.line_slope(), 0.0)),
        bound: Some(mean_shift_bound(config)?),
        target: Some(grid[target_cell].model_id()),
        ratio_nonconstant: None,
    }
    .finish()
}

/// `probit(acc') / probit(acc)` for a linear model, from the exact margins.
fn probit_ratio(
    task: &GaussianTask,
    shifted: &GaussianTask,
    model: &crate::learners::TrainedModel,
) -> Result<Option<f64>> {
    let Some(clf) = model.as_linear() else {
        return Ok(None);
    };
    let ratio = exact_probit_margin(shifted, clf)? / exact_probit_margin(task, clf)?;
    Ok(ratio.is_finite().then_some(ratio))
}

fn ratio_spread(diagnostics: &[&ModelDiagnostic]) -> Option<bool> {
    let ratios: Vec<f64> = diagnostics.iter().filter_map(|d| d.probit_ratio).collect();
    if ratios.is_empty() {
        return None;
    }
    let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    Some(max / min > 1.05)
}

/// Diagonal-covariance task under `Σ' = Σ + s2·I` (or `κ·Σ` when
/// `shift.covariance = "scale"`); reports each linear model's probit ratio.
pub fn run_covariance_shift(config: &ScenarioConfig) -> Result<ScenarioResult> {
    expect_kind(config, ScenarioKind::CovarianceShift)?;
    let setup = covariance_setup(config)?;
    let spec = match config.shift.covariance {
        CovarianceShiftKind::Add => ShiftSpec::CovarianceAdd { s2: config.shift.s2 },
        CovarianceShiftKind::Scale => ShiftSpec::CovarianceScale {
            kappa: config.shift.kappa,
        },
    };
    let shifted = apply_shift(&setup.task, &spec)?;
    covariance_trend(config, &setup.task, &setup.train, &[("", &shifted, TAG_EVAL_OOD)])
}

/// Same grid under two shifts adding equal total variance: `κ·Σ` (noise
/// shaped like the data) and `Σ + s2·I` with `s2 = (κ-1)·tr(Σ)/d`.
pub fn run_matched_noise(config: &ScenarioConfig) -> Result<ScenarioResult> {
    expect_kind(config, ScenarioKind::MatchedNoise)?;
    let setup = covariance_setup(config)?;
    let kappa = config.shift.kappa;
    let d = setup.task.dim();
    let trace: f64 = (0..d).map(|j| setup.task.variance(j)).sum();
    let matched = apply_shift(&setup.task, &ShiftSpec::CovarianceScale { kappa })?;
    let isotropic = apply_shift(
        &setup.task,
        &ShiftSpec::CovarianceAdd {
            s2: (kappa - 1.0) * trace / d as f64,
        },
    )?;
    covariance_trend(
        config,
        &setup.task,
        &setup.train,
        &[
            ("matched", &matched, TAG_EVAL_OOD),
            ("isotropic", &isotropic, TAG_EVAL_OOD_ALT),
        ],
    )
}

/// Grid over a diagonal task with one record per model and shift. Named
/// shifts tag their records with `noise=<name>` and get their own group.
fn covariance_trend(
    config: &ScenarioConfig,
    task: &GaussianTask,
    train: &[LabeledSample],
    shifts: &[(&str, &GaussianTask, u64)],
) -> Result<ScenarioResult> {
    let d = task.dim();
    let grid = cells(config, &[0]);
    let outputs = par_map(&grid, |cell| {
        let mut out = CellOutput::default();
        let model = match train_cell(cell, train, &[], d)? {
            Ok(model) => model,
            Err(reason) => {
                for (name, _, _) in shifts {
                    out.skipped.push(cell.skipped(&noise_tag(name), reason.clone()));
                }
                return Ok(out);
            }
        };
        let id = eval(config, &model, task, TAG_EVAL_ID, cell.key)?;
        for (name, shifted, tag) in shifts {
            let ood = eval(config, &model, shifted, *tag, cell.key)?;
            let record = cell.record(&noise_tag(name), id, ood);
            if let Some(ratio) = probit_ratio(task, shifted, &model)? {
                out.diagnostics.push(ModelDiagnostic {
                    model_id: record.model_id.clone(),
                    deviation: None,
                    probit_ratio: Some(ratio),
                });
            }
            out.records.push(record);
        }
        Ok(out)
    })?;

    let ratio_nonconstant = {
        let all: Vec<&ModelDiagnostic> = outputs.iter().flat_map(|o| &o.diagnostics).collect();
        if shifts.len() == 1 {
            ratio_spread(&all)
        } else {
            // Flag the additive (last) shift, the one expected to break the trend.
            let name = shifts[shifts.len() - 1].0;
            let tag = format!("noise={name}");
            ratio_spread(&all.into_iter().filter(|m| m.model_id.contains(&tag)).collect::<Vec<_>>())
        }
    };

    let mut groups: Vec<Group> = Vec::new();
    for (name, _, _) in shifts {
        if name.is_empty() {
            groups.push(("linear".into(), Box::new(|_: &EvalRecord| true)));
        } else {
            let name = name.to_string();
            let label = name.clone();
            groups.push((
                label,
                Box::new(move |r: &EvalRecord| r.hyperparams.get("noise") == Some(&name)),
            ));
        }
    }
    Assembly {
        config,
        outputs,
        groups,
        theoretical_line: None,
        bound: None,
        target: None,
        ratio_nonconstant,
    }
    .finish()
}

fn noise_tag(name: &str) -> Vec<(&str, &str)> {
    if name.is_empty() {
        Vec::new()
    } else {
        vec![("noise", name)]
    }
}
