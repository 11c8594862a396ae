use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::shift::l2;
use super::task::GaussianTask;
use crate::error::{Error, Result};
use crate::rng::SimRng;

/// Feature vector with a `±1` label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub x: Vec<f64>,
    pub y: f64,
}

impl LabeledSample {
    pub fn new(x: Vec<f64>, y: f64) -> Result<Self> {
        if y != 1.0 && y != -1.0 {
            return Err(Error::domain(format!("label {y} is not +1 or -1")));
        }
        Ok(LabeledSample { x, y })
    }
}

/// Uniform draw from the unit sphere in `R^d` (normalized Gaussian).
pub fn sample_unit_sphere(d: usize, rng: &mut SimRng) -> Result<Vec<f64>> {
    if d == 0 {
        return Err(Error::domain("sphere dimension must be at least 1"));
    }
    loop {
        let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        let norm = l2(&v);
        if norm > 0.0 {
            return Ok(v.into_iter().map(|x| x / norm).collect());
        }
    }
}

/// `n` i.i.d. samples from the task.
pub fn sample_dataset(task: &GaussianTask, n: usize, rng: &mut SimRng) -> Result<Vec<LabeledSample>> {
    sample_dataset_prefix(task, n, task.dim(), rng)
}

/// `n` i.i.d. samples keeping only the first `dims` coordinates.
///
/// Coordinates are independent given the label, so this has exactly the
/// distribution of projecting full samples; it just never draws the rest.
pub fn sample_dataset_prefix(
    task: &GaussianTask,
    n: usize,
    dims: usize,
    rng: &mut SimRng,
) -> Result<Vec<LabeledSample>> {
    if n == 0 {
        return Err(Error::domain("dataset size must be at least 1"));
    }
    if dims == 0 || dims > task.dim() {
        return Err(Error::domain(format!(
            "prefix length {dims} outside [1, {}]",
            task.dim()
        )));
    }
    Ok((0..n)
        .map(|_| {
            let (x, y) = task.draw_prefix(dims, rng);
            LabeledSample { x, y }
        })
        .collect())
}

/// Auxiliary distribution `D''`: mean `μ' + β Δ̃` for a fresh direction Δ̃,
/// isotropic noise `sigma_aux`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxTask {
    pub task: GaussianTask,
    pub delta_tilde: Vec<f64>,
}

pub fn make_aux_task(
    shifted: &GaussianTask,
    beta: f64,
    sigma_aux: f64,
    rng: &mut SimRng,
) -> Result<AuxTask> {
    let delta_tilde = sample_unit_sphere(shifted.dim(), rng)?;
    let mu = shifted
        .mu()
        .iter()
        .zip(&delta_tilde)
        .map(|(m, d)| m + beta * d)
        .collect();
    Ok(AuxTask {
        task: GaussianTask::isotropic(mu, sigma_aux)?,
        delta_tilde,
    })
}
