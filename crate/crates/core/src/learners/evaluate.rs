//! Accuracy estimation on fresh samples.
//!
//! Drawing full `d`-dimensional test points is wasteful when `d` is large
//! and a model only reads a few statistics of each point. Every sampler
//! here draws exactly those statistics from their joint distribution under
//! the task, so each model's predictions have exactly the distribution they
//! would have on i.i.d. full samples:
//!
//! * linear: `θᵀx | y ~ N(y·θᵀμ, θᵀΣθ)`;
//! * k-NN: the vector of inner products with the training points is
//!   Gaussian given `y`; with `S x_i = Q R e_i` (thin QR of the noise-scaled
//!   training matrix) it equals `y·μᵀx_i + (Rᵀw)_i` for `w ~ N(0, I)`;
//! * forest: coordinates are independent given `y`, so each is drawn the
//!   first time any tree reads it.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::forest::ForestModel;
use super::knn::KnnModel;
use super::TrainedModel;
use crate::error::{Error, Result};
use crate::gaussian_shift::{exact_linear_accuracy, GaussianTask, LabeledSample, LinearClassifier, Noise};
use crate::rng::SimRng;
use crate::stats::MetricEstimate;

/// Fraction of `samples` the model labels correctly.
pub fn accuracy_on(model: &TrainedModel, samples: &[LabeledSample]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::domain("accuracy needs at least one sample"));
    }
    let correct = samples.iter().filter(|s| model.predict(&s.x) == s.y).count();
    Ok(correct as f64 / samples.len() as f64)
}

/// Monte Carlo accuracy on `n_test` fresh draws from `task`, with a
/// Clopper-Pearson interval at `confidence`.
pub fn empirical_accuracy(
    model: &TrainedModel,
    task: &GaussianTask,
    n_test: u64,
    rng: &mut SimRng,
    confidence: f64,
) -> Result<MetricEstimate> {
    if n_test == 0 {
        return Err(Error::domain("n_test must be at least 1"));
    }
    if model.input_dims() > task.dim() {
        return Err(Error::DimensionMismatch {
            expected: task.dim(),
            got: model.input_dims(),
        });
    }
    let correct = match model {
        TrainedModel::Linear(clf) => count_linear(clf, task, n_test, rng)?,
        TrainedModel::Knn(knn) => count_knn(knn, task, n_test, rng)?,
        TrainedModel::Forest(forest) => count_forest(forest, task, n_test, rng),
    };
    MetricEstimate::from_counts(correct, n_test, confidence)
}

/// Exact accuracy for linear models, [`empirical_accuracy`] otherwise.
pub fn evaluate(
    model: &TrainedModel,
    task: &GaussianTask,
    n_test: u64,
    rng: &mut SimRng,
    confidence: f64,
) -> Result<MetricEstimate> {
    match model {
        TrainedModel::Linear(clf) => MetricEstimate::exact(exact_linear_accuracy(task, clf)?),
        _ => empirical_accuracy(model, task, n_test, rng, confidence),
    }
}

#[inline]
fn draw_label(rng: &mut SimRng) -> f64 {
    if rng.gen_bool(0.5) {
        1.0
    } else {
        -1.0
    }
}

fn count_linear(clf: &LinearClassifier, task: &GaussianTask, n_test: u64, rng: &mut SimRng) -> Result<u64> {
    let clf = if clf.dim() == task.dim() {
        clf.clone()
    } else {
        LinearClassifier::padded(clf.weights().to_vec(), task.dim())?
    };
    let signal = clf.dot(task.mu());
    let spread: f64 = clf
        .weights()
        .iter()
        .enumerate()
        .map(|(j, t)| t * t * task.variance(j))
        .sum::<f64>()
        .sqrt();
    let mut correct = 0;
    for _ in 0..n_test {
        let y = draw_label(rng);
        let z: f64 = StandardNormal.sample(rng);
        let score = y * signal + spread * z;
        let predicted = if score >= 0.0 { 1.0 } else { -1.0 };
        if predicted == y {
            correct += 1;
        }
    }
    Ok(correct)
}

fn count_knn(knn: &KnnModel, task: &GaussianTask, n_test: u64, rng: &mut SimRng) -> Result<u64> {
    let dims = knn.dims();
    let n = knn.points().len();
    // B = S X_trainᵀ, columns are noise-scaled training points.
    let scaled = DMatrix::from_fn(dims, n, |j, i| task.std_dev(j) * knn.points()[i][j]);
    let r_factor = if dims >= n {
        scaled.qr().r()
    } else {
        // More points than dimensions: B itself is a valid (dims x n) factor
        // because Bᵀz with z ~ N(0, I_dims) already has covariance BᵀB.
        scaled
    };
    let rank = r_factor.nrows();
    let mean_dot: Vec<f64> = knn
        .points()
        .iter()
        .map(|p| p.iter().zip(task.mu()).map(|(a, b)| a * b).sum())
        .collect();
    let mut w = DVector::zeros(rank);
    let mut scores = vec![0.0; n];
    let mut correct = 0;
    for _ in 0..n_test {
        let y = draw_label(rng);
        for wk in w.iter_mut() {
            *wk = StandardNormal.sample(rng);
        }
        let noise_dot = r_factor.tr_mul(&w);
        for i in 0..n {
            // ‖x_i‖² - 2 xᵀx_i orders neighbours like ‖x - x_i‖².
            scores[i] = knn.sq_norms()[i] - 2.0 * (y * mean_dot[i] + noise_dot[i]);
        }
        if knn.vote(&scores) == y {
            correct += 1;
        }
    }
    Ok(correct)
}

fn count_forest(forest: &ForestModel, task: &GaussianTask, n_test: u64, rng: &mut SimRng) -> u64 {
    let dims = forest.dims();
    let mut values = vec![0.0; dims];
    let mut stamp = vec![0u64; dims];
    let mu = task.mu();
    let stds: Vec<f64> = match task.noise() {
        Noise::Isotropic { sigma } => vec![*sigma; dims],
        Noise::Diagonal { variances } => variances[..dims].iter().map(|v| v.sqrt()).collect(),
    };
    let mut correct = 0;
    for round in 1..=n_test {
        let y = draw_label(rng);
        let predicted = forest.predict_with(|j| {
            if stamp[j] != round {
                stamp[j] = round;
                let z: f64 = StandardNormal.sample(rng);
                values[j] = y * mu[j] + stds[j] * z;
            }
            values[j]
        });
        if predicted == y {
            correct += 1;
        }
    }
    correct
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian_shift::{sample_dataset, sample_unit_sphere};
    use crate::learners::{train_forest, KnnModel};
    use crate::rng::rng_from_seed;

    fn within_ci(estimate: &MetricEstimate, truth: f64) -> bool {
        estimate.ci_lo.get() <= truth && truth <= estimate.ci_hi.get()
    }

    #[test]
    fn chance_classifier_is_near_half() {
        let task = GaussianTask::isotropic(vec![1.0, 0.0], 1.0).unwrap();
        let model = TrainedModel::Linear(LinearClassifier::new(vec![0.0, 1.0]).unwrap());
        let est = empirical_accuracy(&model, &task, 1_000_000, &mut rng_from_seed(1), 0.95).unwrap();
        assert!(within_ci(&est, 0.5), "{est:?}");
    }

    #[test]
    fn exact_path_has_zero_width() {
        let task = GaussianTask::isotropic(vec![0.6, 0.8], 1.0).unwrap();
        let clf = LinearClassifier::new(vec![0.6, 0.8]).unwrap();
        let exact = exact_linear_accuracy(&task, &clf).unwrap();
        let est = evaluate(&TrainedModel::Linear(clf), &task, 10, &mut rng_from_seed(1), 0.95).unwrap();
        assert_eq!(est.value.get(), exact);
        assert_eq!(est.ci_lo, est.ci_hi);
        assert!(est.is_exact());
    }

    /// Sampled-statistic estimates agree with brute force on full vectors.
    #[test]
    fn samplers_match_full_vector_evaluation() {
        let d = 12;
        let mut rng = rng_from_seed(2);
        let mu = sample_unit_sphere(d, &mut rng).unwrap();
        let variances: Vec<f64> = (0..d).map(|j| if j % 3 == 0 { 0.05 } else { 0.4 }).collect();
        let task = GaussianTask::diagonal(mu, variances).unwrap();
        let train: Vec<_> = sample_dataset(&task, 25, &mut rng)
            .unwrap()
            .into_iter()
            .map(|s| LabeledSample { x: s.x[..8].to_vec(), y: s.y })
            .collect();
        let models = [
            TrainedModel::Knn(KnnModel::fit(&train, 1).unwrap()),
            TrainedModel::Knn(KnnModel::fit(&train, 3).unwrap()),
            TrainedModel::Forest(train_forest(&train, 5, None, &mut rng).unwrap()),
            TrainedModel::Linear(LinearClassifier::padded(vec![1.0, -0.5, 0.2], d).unwrap()),
        ];
        let test = sample_dataset(&task, 200_000, &mut rng).unwrap();
        for model in &models {
            let brute = accuracy_on(model, &test).unwrap();
            let est = empirical_accuracy(model, &task, 200_000, &mut rng, 0.999).unwrap();
            // two independent estimates, each with sd <= 0.0012
            assert!((brute - est.value.get()).abs() < 0.008, "{brute} vs {est:?}");
        }
    }

    #[test]
    fn knn_with_more_points_than_dims() {
        let d = 3;
        let mut rng = rng_from_seed(3);
        let mu = sample_unit_sphere(d, &mut rng).unwrap();
        let task = GaussianTask::isotropic(mu, 0.7).unwrap();
        let train = sample_dataset(&task, 40, &mut rng).unwrap();
        let model = TrainedModel::Knn(KnnModel::fit(&train, 3).unwrap());
        let test = sample_dataset(&task, 200_000, &mut rng).unwrap();
        let brute = accuracy_on(&model, &test).unwrap();
        let est = empirical_accuracy(&model, &task, 200_000, &mut rng, 0.95).unwrap();
        assert!((brute - est.value.get()).abs() < 0.008);
    }

    #[test]
    fn linear_monte_carlo_matches_exact() {
        let d = 10;
        let mut rng = rng_from_seed(4);
        let mu = sample_unit_sphere(d, &mut rng).unwrap();
        let task = GaussianTask::isotropic(mu.clone(), 1.0).unwrap();
        let theta: Vec<f64> = mu.iter().enumerate().map(|(j, m)| m + 0.1 * j as f64).collect();
        let clf = LinearClassifier::new(theta).unwrap();
        let exact = exact_linear_accuracy(&task, &clf).unwrap();
        let model = TrainedModel::Linear(clf);
        let test = sample_dataset(&task, 1_000_000, &mut rng).unwrap();
        let correct = test.iter().filter(|s| model.predict(&s.x) == s.y).count() as u64;
        let est = MetricEstimate::from_counts(correct, 1_000_000, 0.95).unwrap();
        assert!(within_ci(&est, exact), "{exact} vs {est:?}");
    }
}
