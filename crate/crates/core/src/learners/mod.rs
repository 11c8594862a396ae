//! From-scratch trainers for the model roster: logistic regression (L1/L2),
//! ridge regression, k-nearest neighbours and random forests, plus the data
//! reductions and accuracy evaluation used by the scenarios.

mod data;
mod evaluate;
mod forest;
mod knn;
mod logistic;
mod ridge;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gaussian_shift::{LabeledSample, LinearClassifier};
use crate::rng::rng_from_seed;

pub use data::{feature_dim, project, subsample};
pub use evaluate::{accuracy_on, empirical_accuracy, evaluate};
pub use forest::{train_forest, ForestModel, Tree};
pub use knn::KnnModel;
pub use logistic::{train_logistic, Penalty, DEFAULT_MAX_ITER, DEFAULT_TOL};
pub use ridge::{ridge_dual, ridge_primal, train_ridge};

/// A learner and its hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LearnerSpec {
    Logistic { penalty: Penalty, inv_reg_c: f64 },
    Ridge { reg_alpha: f64 },
    Knn { k: usize },
    RandomForest { n_trees: usize, max_depth: Option<usize>, seed: u64 },
}

impl LearnerSpec {
    pub fn family(&self) -> &'static str {
        match self {
            LearnerSpec::Logistic { penalty: Penalty::L1, .. } => "logistic_l1",
            LearnerSpec::Logistic { penalty: Penalty::L2, .. } => "logistic_l2",
            LearnerSpec::Ridge { .. } => "ridge",
            LearnerSpec::Knn { .. } => "knn",
            LearnerSpec::RandomForest { .. } => "random_forest",
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, LearnerSpec::Logistic { .. } | LearnerSpec::Ridge { .. })
    }

    /// Hyperparameters as strings, for records.
    pub fn hyperparams(&self) -> BTreeMap<String, String> {
        let mut out = BTreeMap::new();
        match self {
            LearnerSpec::Logistic { penalty, inv_reg_c } => {
                out.insert("penalty".into(), penalty.name().into());
                out.insert("C".into(), format!("{inv_reg_c:e}"));
            }
            LearnerSpec::Ridge { reg_alpha } => {
                out.insert("alpha".into(), format!("{reg_alpha:e}"));
            }
            LearnerSpec::Knn { k } => {
                out.insert("k".into(), k.to_string());
            }
            LearnerSpec::RandomForest { n_trees, max_depth, .. } => {
                out.insert("n_trees".into(), n_trees.to_string());
                out.insert(
                    "max_depth".into(),
                    max_depth.map_or_else(|| "none".to_string(), |d| d.to_string()),
                );
            }
        }
        out
    }

    /// Train on `data`; logistic uses the default tolerance and iteration cap.
    pub fn train(&self, data: &[LabeledSample]) -> Result<TrainedModel> {
        match *self {
            LearnerSpec::Logistic { penalty, inv_reg_c } => Ok(TrainedModel::Linear(train_logistic(
                data,
                penalty,
                inv_reg_c,
                DEFAULT_TOL,
                DEFAULT_MAX_ITER,
            )?)),
            LearnerSpec::Ridge { reg_alpha } => Ok(TrainedModel::Linear(train_ridge(data, reg_alpha)?)),
            LearnerSpec::Knn { k } => Ok(TrainedModel::Knn(KnnModel::fit(data, k)?)),
            LearnerSpec::RandomForest { n_trees, max_depth, seed } => Ok(TrainedModel::Forest(
                train_forest(data, n_trees, max_depth, &mut rng_from_seed(seed))?,
            )),
        }
    }
}

/// A fitted model. Linear models admit exact accuracies; the others are
/// evaluated by sampling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TrainedModel {
    Linear(LinearClassifier),
    Knn(KnnModel),
    Forest(ForestModel),
}

impl TrainedModel {
    /// Predicted `±1` label; `x` needs at least [`Self::input_dims`] entries.
    pub fn predict(&self, x: &[f64]) -> f64 {
        match self {
            TrainedModel::Linear(clf) => clf.predict(x),
            TrainedModel::Knn(knn) => knn.classify(x),
            TrainedModel::Forest(forest) => forest.predict(x),
        }
    }

    /// Number of leading coordinates the model reads.
    pub fn input_dims(&self) -> usize {
        match self {
            TrainedModel::Linear(clf) => clf.weights().len(),
            TrainedModel::Knn(knn) => knn.dims(),
            TrainedModel::Forest(forest) => forest.dims(),
        }
    }

    pub fn as_linear(&self) -> Option<&LinearClassifier> {
        match self {
            TrainedModel::Linear(clf) => Some(clf),
            _ => None,
        }
    }

    /// Zero-pad a linear model to dimension `dim`; other models are unchanged.
    pub fn embedded(self, dim: usize) -> Result<Self> {
        match self {
            TrainedModel::Linear(clf) => Ok(TrainedModel::Linear(LinearClassifier::padded(
                clf.weights().to_vec(),
                dim,
            )?)),
            other => Ok(other),
        }
    }
}
