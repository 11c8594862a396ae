use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::normal_cdf;
use crate::rng::SimRng;

/// Class-conditional noise model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Noise {
    /// `σ² I`
    Isotropic { sigma: f64 },
    /// `diag(variances)`
    Diagonal { variances: Vec<f64> },
}

/// Binary task with `y` uniform on `{-1, +1}` and `x | y ~ N(y·μ, Σ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianTask {
    mu: Vec<f64>,
    noise: Noise,
}

impl GaussianTask {
    pub fn isotropic(mu: Vec<f64>, sigma: f64) -> Result<Self> {
        GaussianTask::new(mu, Noise::Isotropic { sigma })
    }

    pub fn diagonal(mu: Vec<f64>, variances: Vec<f64>) -> Result<Self> {
        GaussianTask::new(mu, Noise::Diagonal { variances })
    }

    pub fn new(mu: Vec<f64>, noise: Noise) -> Result<Self> {
        if mu.is_empty() {
            return Err(Error::domain("task dimension must be at least 1"));
        }
        if mu.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("task mean must be finite"));
        }
        match &noise {
            Noise::Isotropic { sigma } => {
                if !(*sigma > 0.0 && sigma.is_finite()) {
                    return Err(Error::domain(format!("noise scale {sigma} must be positive")));
                }
            }
            Noise::Diagonal { variances } => {
                if variances.len() != mu.len() {
                    return Err(Error::DimensionMismatch {
                        expected: mu.len(),
                        got: variances.len(),
                    });
                }
                if variances.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                    return Err(Error::domain("all noise variances must be positive"));
                }
            }
        }
        Ok(GaussianTask { mu, noise })
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn noise(&self) -> &Noise {
        &self.noise
    }

    /// Noise variance of coordinate `j`.
    #[inline]
    pub fn variance(&self, j: usize) -> f64 {
        match &self.noise {
            Noise::Isotropic { sigma } => sigma * sigma,
            Noise::Diagonal { variances } => variances[j],
        }
    }

    #[inline]
    pub fn std_dev(&self, j: usize) -> f64 {
        self.variance(j).sqrt()
    }

    pub fn sigma(&self) -> Option<f64> {
        match self.noise {
            Noise::Isotropic { sigma } => Some(sigma),
            Noise::Diagonal { .. } => None,
        }
    }

    /// Draw a label and the first `dims` coordinates of its feature vector.
    pub fn draw_prefix(&self, dims: usize, rng: &mut SimRng) -> (Vec<f64>, f64) {
        let y = if rand::Rng::gen_bool(rng, 0.5) { 1.0 } else { -1.0 };
        let x = (0..dims)
            .map(|j| {
                let z: f64 = StandardNormal.sample(rng);
                y * self.mu[j] + self.std_dev(j) * z
            })
            .collect();
        (x, y)
    }
}

/// Classifier `x -> sign(θᵀx)` without intercept.
///
/// Only a prefix of θ is stored; coordinates past `theta.len()` up to `dim`
/// are zero. This is how classifiers trained on projected features are
/// embedded back into the full task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearClassifier {
    theta: Vec<f64>,
    dim: usize,
}

impl LinearClassifier {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        let dim = theta.len();
        LinearClassifier::padded(theta, dim)
    }

    /// Zero-pad `prefix` to dimension `dim`.
    pub fn padded(prefix: Vec<f64>, dim: usize) -> Result<Self> {
        if prefix.len() > dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: prefix.len(),
            });
        }
        if prefix.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("classifier weights must be finite"));
        }
        if prefix.iter().all(|&v| v == 0.0) {
            return Err(Error::ZeroClassifier);
        }
        Ok(LinearClassifier { theta: prefix, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Stored (nonzero-prefix) weights.
    pub fn weights(&self) -> &[f64] {
        &self.theta
    }

    /// Full-length weight vector.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut v = self.theta.clone();
        v.resize(self.dim, 0.0);
        v
    }

    pub fn norm(&self) -> f64 {
        self.theta.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `θᵀv` for a full-length `v`.
    pub fn dot(&self, v: &[f64]) -> f64 {
        self.theta.iter().zip(v).map(|(a, b)| a * b).sum()
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        LinearClassifier::padded(self.theta.iter().map(|v| c * v).collect(), self.dim)
    }

    /// Predicted label for a feature vector of at least the stored length.
    pub fn predict(&self, x: &[f64]) -> f64 {
        if self.dot(x) >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }

    fn check_dim(&self, task: &GaussianTask) -> Result<()> {
        if self.dim != task.dim() {
            return Err(Error::DimensionMismatch {
                expected: task.dim(),
                got: self.dim,
            });
        }
        Ok(())
    }
}

/// The probit of the exact accuracy, `θᵀμ / sqrt(θᵀΣθ)`.
pub fn exact_probit_margin(task: &GaussianTask, clf: &LinearClassifier) -> Result<f64> {
    clf.check_dim(task)?;
    let signal = clf.dot(task.mu());
    let spread = match task.noise() {
        Noise::Isotropic { sigma } => clf.norm() * sigma,
        Noise::Diagonal { variances } => clf
            .weights()
            .iter()
            .zip(variances)
            .map(|(t, v)| t * t * v)
            .sum::<f64>()
            .sqrt(),
    };
    Ok(signal / spread)
}

/// Closed-form accuracy of a linear classifier on the task.
pub fn exact_linear_accuracy(task: &GaussianTask, clf: &LinearClassifier) -> Result<f64> {
    Ok(normal_cdf(exact_probit_margin(task, clf)?))
}
