use serde::{Deserialize, Serialize};

use super::shift::{apply_shift, MeanShift, ShiftSpec};
use super::task::{exact_linear_accuracy, GaussianTask, LinearClassifier};
use crate::error::{Error, Result};
use crate::numerics::probit;

/// Signed distance of a classifier from the `α/γ` probit line, computed
/// from the two exact accuracies and from the closed form
/// `(β/(γσ)) · θᵀΔ/‖θ‖`.
///
/// `via_accuracies` is `None` when either accuracy rounds to exactly 0 or 1
/// in double precision and so has no finite probit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbitDeviation {
    pub via_accuracies: Option<f64>,
    pub closed_form: f64,
}

impl ProbitDeviation {
    /// Both routes are available and within `tol` of each other.
    pub fn agrees(&self, tol: f64) -> bool {
        self.via_accuracies
            .is_some_and(|v| (v - self.closed_form).abs() <= tol)
    }
}

pub fn probit_deviation(
    task: &GaussianTask,
    shift: &MeanShift,
    clf: &LinearClassifier,
) -> Result<ProbitDeviation> {
    let sigma = task
        .sigma()
        .ok_or_else(|| Error::Incompatible("probit deviation needs isotropic noise".into()))?;
    let shifted = apply_shift(task, &ShiftSpec::Mean(shift.clone()))?;
    let acc = exact_linear_accuracy(task, clf)?;
    let acc_shifted = exact_linear_accuracy(&shifted, clf)?;
    let via_accuracies = match (probit(acc_shifted), probit(acc)) {
        (Ok(z_shifted), Ok(z)) => Some(z_shifted - shift.line_slope() * z),
        _ => None,
    };
    let closed_form = shift.beta / (shift.gamma * sigma) * clf.dot(shift.delta()) / clf.norm();
    Ok(ProbitDeviation {
        via_accuracies,
        closed_form,
    })
}

/// High-probability bound on `|probit deviation|` for one classifier chosen
/// independently of the random shift direction.
pub fn theorem_bound(beta: f64, gamma: f64, sigma: f64, d: usize, confidence_delta: f64) -> Result<f64> {
    theorem_bound_union(beta, gamma, sigma, d, confidence_delta, 1)
}

/// Union-bound version covering `n_models` classifiers simultaneously.
pub fn theorem_bound_union(
    beta: f64,
    gamma: f64,
    sigma: f64,
    d: usize,
    confidence_delta: f64,
    n_models: usize,
) -> Result<f64> {
    if !(beta >= 0.0 && gamma > 0.0 && sigma > 0.0 && d >= 1) {
        return Err(Error::domain("bound needs beta >= 0, gamma > 0, sigma > 0, d >= 1"));
    }
    if !(confidence_delta > 0.0 && confidence_delta < 1.0) {
        return Err(Error::domain(format!(
            "confidence parameter {confidence_delta} outside (0, 1)"
        )));
    }
    if n_models == 0 {
        return Err(Error::domain("union bound needs at least one model"));
    }
    let log_term = (2.0 * n_models as f64 / confidence_delta).ln();
    Ok(beta / (gamma * sigma) * (2.0 * log_term / d as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SIGMA: f64 = 0.031_622_776_601_683_79; // 10^-1.5

    #[test]
    fn bound_reference_values() {
        // direct mpmath evaluation
        let b = theorem_bound(0.5, 1.0, SIGMA, 100_000, 0.01).unwrap();
        assert!((b - 0.162_762_363_071_872_9).abs() < 1e-12);
        assert!((b - 0.162_76).abs() < 1e-4);
        let b05 = theorem_bound(0.5, 1.0, SIGMA, 100_000, 0.05).unwrap();
        assert!((b05 - 0.135_810_151_574_061_95).abs() < 1e-12);
        let u = theorem_bound_union(0.5, 1.0, SIGMA, 100_000, 0.01, 100).unwrap();
        assert!((u - 0.222_525_139_619_506).abs() < 1e-12);
        assert_eq!(theorem_bound(0.0, 1.0, SIGMA, 10, 0.01).unwrap(), 0.0);
    }

    #[test]
    fn bound_scaling() {
        let b = theorem_bound(0.5, 1.0, SIGMA, 1000, 0.01).unwrap();
        let b4 = theorem_bound(0.5, 1.0, SIGMA, 4000, 0.01).unwrap();
        assert!((b / b4 - 2.0).abs() < 1e-12);
        assert_eq!(theorem_bound_union(0.5, 1.0, SIGMA, 1000, 0.01, 1).unwrap(), b);
        let u2 = theorem_bound_union(0.5, 1.0, 1.0, 1, 0.5, 2).unwrap();
        assert!((u2 - 0.5 * (2.0 * 8f64.ln()).sqrt()).abs() < 1e-15);
        assert!(theorem_bound(0.5, 1.0, SIGMA, 10, 1.0).is_err());
        assert!(theorem_bound_union(0.5, 1.0, SIGMA, 10, 0.1, 0).is_err());
    }

    #[test]
    fn deviation_examples() {
        let mu = vec![0.02, 0.02, 0.02, 0.02];
        let task = GaussianTask::isotropic(mu, SIGMA).unwrap();
        let clf = LinearClassifier::new(vec![0.1, 0.0, 0.1, 0.0]).unwrap();

        // Δ orthogonal to θ
        let orth = vec![0.0, 1.0, 0.0, 0.0];
        let dev = probit_deviation(&task, &MeanShift::new(0.7, 0.5, 1.0, orth).unwrap(), &clf).unwrap();
        assert!(dev.closed_form.abs() < 1e-15);
        assert!(dev.agrees(1e-8));

        // Δ along θ
        let along: Vec<f64> = clf.to_dense().iter().map(|v| v / clf.norm()).collect();
        let dev = probit_deviation(&task, &MeanShift::new(0.7, 0.5, 1.0, along).unwrap(), &clf).unwrap();
        assert!((dev.closed_form - 15.811_388_300_841_896).abs() < 1e-9);
        // OOD accuracy saturates at 1.0 here
        assert_eq!(dev.via_accuracies, None);
        assert!(!dev.agrees(1.0));

        // adversarial, c = -0.03
        let adv = MeanShift::adversarial(0.7, 0.5, 1.0, -0.03, &clf).unwrap();
        let dev = probit_deviation(&task, &adv, &clf).unwrap();
        assert!((dev.closed_form + 0.474_341_649_025_256_9).abs() < 1e-12);
        assert!(dev.agrees(1e-8), "{dev:?}");
    }
}
