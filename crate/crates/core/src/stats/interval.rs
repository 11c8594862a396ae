use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{binomial_cdf, binomial_sf};

const ROOT_TOL: f64 = 1e-12;

/// Exact (Clopper-Pearson) binomial confidence interval for `successes`
/// out of `n` trials.
pub fn clopper_pearson(successes: u64, n: u64, confidence: f64) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::domain("Clopper-Pearson interval needs n >= 1"));
    }
    if successes > n {
        return Err(Error::domain(format!(
            "successes ({successes}) exceed trials ({n})"
        )));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::domain(format!("confidence {confidence} outside (0, 1)")));
    }
    let tail = 0.5 * (1.0 - confidence);
    let k = successes;

    let lo = if k == 0 {
        0.0
    } else {
        // P[Bin(n, p) >= k] increases with p.
        bisect(|p| binomial_sf(k, n, p).map(|v| v - tail), true)?
    };
    let hi = if k == n {
        1.0
    } else {
        // P[Bin(n, p) <= k] decreases with p.
        bisect(|p| binomial_cdf(k, n, p).map(|v| v - tail), false)?
    };
    Ok((lo, hi))
}

fn bisect(f: impl Fn(f64) -> Result<f64>, increasing: bool) -> Result<f64> {
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while hi - lo > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        let below = f(mid)? < 0.0;
        if below == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One class's F1 score together with its test-set support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerClassF1 {
    pub f1: f64,
    pub n: u64,
}

impl PerClassF1 {
    pub fn new(f1: f64, n: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&f1) {
            return Err(Error::domain(format!("F1 score {f1} outside [0, 1]")));
        }
        if n == 0 {
            return Err(Error::domain("class must appear in the test data (n >= 1)"));
        }
        Ok(PerClassF1 { f1, n })
    }

    /// From confusion counts. F1 is 0 when precision + recall is 0.
    pub fn from_counts(true_pos: u64, false_pos: u64, false_neg: u64) -> Result<Self> {
        let n = true_pos + false_neg;
        let denom = 2 * true_pos + false_pos + false_neg;
        let f1 = if true_pos == 0 || denom == 0 {
            0.0
        } else {
            2.0 * true_pos as f64 / denom as f64
        };
        PerClassF1::new(f1, n)
    }
}

/// Macro-F1 with the per-class half-width heuristic.
///
/// Each class contributes `δ_i`, the half-width of the Clopper-Pearson
/// interval for `floor(n_i / 2)` successes out of `n_i`. Returns the mean F1
/// and the combined half-width `mean(δ_i) / sqrt(C)`.
pub fn macro_f1_ci(classes: &[PerClassF1], confidence: f64) -> Result<(f64, f64)> {
    if classes.is_empty() {
        return Err(Error::domain("macro F1 needs at least one class"));
    }
    let count = classes.len() as f64;
    let mut f_sum = 0.0;
    let mut delta_sum = 0.0;
    for class in classes {
        if class.n == 0 {
            return Err(Error::domain("class must appear in the test data (n >= 1)"));
        }
        let (lo, hi) = clopper_pearson(class.n / 2, class.n, confidence)?;
        f_sum += class.f1;
        delta_sum += 0.5 * (hi - lo);
    }
    Ok((f_sum / count, delta_sum / count / count.sqrt()))
}
