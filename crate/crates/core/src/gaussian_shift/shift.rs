use serde::{Deserialize, Serialize};

use super::task::{GaussianTask, LinearClassifier, Noise};
use crate::error::{Error, Result};

const UNIT_TOL: f64 = 1e-12;

/// `μ' = α μ + β Δ`, `σ' = γ σ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanShift {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    delta: Vec<f64>,
}

impl MeanShift {
    /// Random-direction shift; `delta` must be a unit vector.
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: Vec<f64>) -> Result<Self> {
        let norm = l2(&delta);
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::domain(format!("shift direction has norm {norm}, expected 1")));
        }
        MeanShift::checked(alpha, beta, gamma, delta)
    }

    /// Shift aimed at a specific classifier: `Δ = c · θ*/‖θ*‖` with
    /// `|c| <= 1`, so `‖Δ‖ = |c|`.
    pub fn adversarial(
        alpha: f64,
        beta: f64,
        gamma: f64,
        c: f64,
        target: &LinearClassifier,
    ) -> Result<Self> {
        if !(-1.0..=1.0).contains(&c) {
            return Err(Error::domain(format!("adversarial scale c = {c} outside [-1, 1]")));
        }
        let scale = c / target.norm();
        let delta = target.to_dense().into_iter().map(|v| scale * v).collect();
        MeanShift::checked(alpha, beta, gamma, delta)
    }

    fn checked(alpha: f64, beta: f64, gamma: f64, delta: Vec<f64>) -> Result<Self> {
        // beta = 0 and alpha = 1 are legitimate identity components.
        if !(alpha >= 0.0 && beta >= 0.0 && gamma > 0.0) {
            return Err(Error::domain(format!(
                "mean shift needs alpha >= 0, beta >= 0, gamma > 0 (got {alpha}, {beta}, {gamma})"
            )));
        }
        if l2(&delta) > 1.0 + UNIT_TOL {
            return Err(Error::domain("shift direction norm exceeds 1"));
        }
        Ok(MeanShift {
            alpha,
            beta,
            gamma,
            delta,
        })
    }

    pub fn delta(&self) -> &[f64] {
        &self.delta
    }

    /// Slope `α/γ` of the probit line the shift induces.
    pub fn line_slope(&self) -> f64 {
        self.alpha / self.gamma
    }
}

/// A distribution shift applied to a [`GaussianTask`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ShiftSpec {
    Mean(MeanShift),
    /// `Σ' = Σ + s2 · I`
    CovarianceAdd { s2: f64 },
    /// `Σ' = κ · Σ`
    CovarianceScale { kappa: f64 },
}

/// Shifted copy of `task`; the input is left untouched.
pub fn apply_shift(task: &GaussianTask, shift: &ShiftSpec) -> Result<GaussianTask> {
    match shift {
        ShiftSpec::Mean(m) => {
            let sigma = task.sigma().ok_or_else(|| {
                Error::Incompatible("mean shifts require isotropic noise".to_string())
            })?;
            if m.delta.len() != task.dim() {
                return Err(Error::DimensionMismatch {
                    expected: task.dim(),
                    got: m.delta.len(),
                });
            }
            let mu = task
                .mu()
                .iter()
                .zip(&m.delta)
                .map(|(u, d)| m.alpha * u + m.beta * d)
                .collect();
            GaussianTask::isotropic(mu, m.gamma * sigma)
        }
        ShiftSpec::CovarianceAdd { s2 } => {
            if !(*s2 >= 0.0 && s2.is_finite()) {
                return Err(Error::domain(format!("added variance {s2} must be non-negative")));
            }
            let noise = match task.noise() {
                Noise::Isotropic { sigma } => Noise::Isotropic {
                    sigma: (sigma * sigma + s2).sqrt(),
                },
                Noise::Diagonal { variances } => Noise::Diagonal {
                    variances: variances.iter().map(|v| v + s2).collect(),
                },
            };
            GaussianTask::new(task.mu().to_vec(), noise)
        }
        ShiftSpec::CovarianceScale { kappa } => {
            if !(*kappa > 0.0 && kappa.is_finite()) {
                return Err(Error::domain(format!("covariance scale {kappa} must be positive")));
            }
            let noise = match task.noise() {
                Noise::Isotropic { sigma } => Noise::Isotropic {
                    sigma: sigma * kappa.sqrt(),
                },
                Noise::Diagonal { variances } => Noise::Diagonal {
                    variances: variances.iter().map(|v| kappa * v).collect(),
                },
            };
            GaussianTask::new(task.mu().to_vec(), noise)
        }
    }
}

pub(crate) fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
