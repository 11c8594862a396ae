//! The Gaussian distribution-shift model.
//!
//! A binary task draws `y` uniformly from `{-1, +1}` and `x | y ~ N(y·μ, Σ)`.
//! A shifted task either moves the mean (`μ' = αμ + βΔ`, `σ' = γσ`) or
//! perturbs the covariance. Linear classifiers have closed-form accuracy
//! `Φ(θᵀμ / sqrt(θᵀΣθ))`, which makes the probit-domain geometry of a shift
//! exact.

mod sampling;
mod shift;
mod task;
mod theory;

pub use sampling::{
    make_aux_task, sample_dataset, sample_dataset_prefix, sample_unit_sphere, AuxTask,
    LabeledSample,
};
pub use shift::{apply_shift, MeanShift, ShiftSpec};
pub use task::{exact_linear_accuracy, exact_probit_margin, GaussianTask, LinearClassifier, Noise};
pub use theory::{probit_deviation, theorem_bound, theorem_bound_union, ProbitDeviation};
