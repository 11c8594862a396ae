use serde::{Deserialize, Serialize};

use super::record::{EvalRecord, MetricEstimate};
use crate::error::{Error, Result};
use crate::numerics::{normal_cdf, probit, TransformKind};

/// Probit-affine map `l -> Φ(slope · Φ⁻¹(l) + offset)` between ID and OOD
/// metrics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTransform {
    pub slope: f64,
    pub offset: f64,
}

impl CorrelationTransform {
    pub fn new(slope: f64, offset: f64) -> Result<Self> {
        if !slope.is_finite() || !offset.is_finite() {
            return Err(Error::domain("correlation transform must be finite"));
        }
        Ok(CorrelationTransform { slope, offset })
    }

    pub fn apply(&self, l: f64) -> Result<f64> {
        Ok(normal_cdf(self.slope * probit(l)? + self.offset))
    }
}

fn clamped_value(m: &MetricEstimate) -> Result<f64> {
    // Reuse the transform clamping rule, then map back.
    let z = m.transformed(TransformKind::Probit)?;
    Ok(normal_cdf(z))
}

/// Largest absolute gap between `gamma(metric_id)` and `metric_ood` over the
/// records; the property holds when that gap is at most `alpha`.
pub fn check_correlation_property(
    records: &[EvalRecord],
    gamma: &CorrelationTransform,
    alpha: f64,
) -> Result<(bool, f64)> {
    if records.is_empty() {
        return Err(Error::domain("correlation check needs at least one record"));
    }
    let mut max_dev = 0.0_f64;
    for r in records {
        let l_id = clamped_value(&r.metric_id)?;
        let l_ood = clamped_value(&r.metric_ood)?;
        max_dev = max_dev.max((gamma.apply(l_id)? - l_ood).abs());
    }
    Ok((max_dev <= alpha, max_dev))
}

/// Points traced by mixing a model with a uniform random guesser over
/// `num_classes` labels: with probability `p` use the model, otherwise guess.
pub fn interpolate_with_random(
    acc_id: f64,
    acc_ood: f64,
    num_classes: u32,
    ps: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if num_classes < 2 {
        return Err(Error::domain("random-classifier mixing needs at least 2 classes"));
    }
    for &a in &[acc_id, acc_ood] {
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::domain(format!("accuracy {a} outside [0, 1]")));
        }
    }
    let chance = 1.0 / num_classes as f64;
    ps.iter()
        .map(|&p| {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::domain(format!("mixing weight {p} outside [0, 1]")));
            }
            Ok((
                p * acc_id + (1.0 - p) * chance,
                p * acc_ood + (1.0 - p) * chance,
            ))
        })
        .collect()
}
