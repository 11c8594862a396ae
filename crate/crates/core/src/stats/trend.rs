use serde::{Deserialize, Serialize};

use super::record::EvalRecord;
use crate::error::{Error, Result};
use crate::numerics::TransformKind;

/// Least-squares line through transformed `(id, ood)` pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendFit {
    pub transform: TransformKind,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

impl TrendFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

/// Unweighted OLS of transformed OOD on transformed ID accuracy.
///
/// Exact metrics sitting at 0 or 1 cannot be transformed and are left out
/// (with a warning); every other record must transform cleanly.
pub fn fit_trend(records: &[EvalRecord], transform: TransformKind) -> Result<TrendFit> {
    let mut points = Vec::with_capacity(records.len());
    for r in records {
        if !(r.metric_id.is_transformable(transform) && r.metric_ood.is_transformable(transform)) {
            log::warn!(
                "excluding `{}` from {} fit: exact accuracy at 0 or 1",
                r.model_id,
                transform
            );
            continue;
        }
        points.push(r.transformed(transform)?);
    }
    fit_points(&points, transform)
}

/// OLS over raw `(x, y)` pairs already in the transformed domain.
///
/// The pairs are sorted before accumulation so the result does not depend on
/// input order.
pub fn fit_points(points: &[(f64, f64)], transform: TransformKind) -> Result<TrendFit> {
    if points.len() < 2 {
        return Err(Error::Degenerate(format!(
            "trend fit needs at least 2 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::domain("trend fit received a non-finite value"));
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let n = sorted.len() as f64;
    let mean_x = sorted.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = sorted.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in &sorted {
        let (dx, dy) = (x - mean_x, y - mean_y);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx <= 0.0 {
        return Err(Error::Degenerate(
            "all transformed ID values are equal".to_string(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    // A constant response is fitted perfectly by the horizontal line.
    let r_squared = if syy <= 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Ok(TrendFit {
        transform,
        slope,
        intercept,
        r_squared,
        n_points: sorted.len(),
    })
}

/// Signed residual of a record above the fitted line, in the fit's
/// transformed domain.
pub fn effective_robustness(record: &EvalRecord, fit: &TrendFit) -> Result<f64> {
    let (x, y) = record.transformed(fit.transform)?;
    Ok(y - fit.predict(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::normal_cdf;
    use crate::stats::MetricEstimate;

    fn exact_record(id: &str, acc_id: f64, acc_ood: f64) -> EvalRecord {
        EvalRecord::new(
            id,
            "test",
            MetricEstimate::exact(acc_id).unwrap(),
            MetricEstimate::exact(acc_ood).unwrap(),
        )
    }

    fn on_line(xs: &[f64], slope: f64, intercept: f64) -> Vec<EvalRecord> {
        xs.iter()
            .enumerate()
            .map(|(i, &x)| {
                exact_record(&format!("m{i}"), normal_cdf(x), normal_cdf(slope * x + intercept))
            })
            .collect()
    }

    #[test]
    fn collinear_probit_points() {
        let recs = on_line(&[-1.0, -0.2, 0.3, 0.9, 1.7], 0.7, -0.5);
        let fit = fit_trend(&recs, TransformKind::Probit).unwrap();
        assert!((fit.slope - 0.7).abs() < 1e-9);
        assert!((fit.intercept + 0.5).abs() < 1e-9);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert_eq!(fit.n_points, 5);
    }

    #[test]
    fn two_points_give_unit_r_squared() {
        let recs = vec![exact_record("a", 0.6, 0.3), exact_record("b", 0.9, 0.85)];
        for kind in TransformKind::ALL {
            let fit = fit_trend(&recs, kind).unwrap();
            assert!((fit.r_squared - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_inputs() {
        let recs = vec![exact_record("a", 0.6, 0.3), exact_record("b", 0.6, 0.5)];
        assert!(matches!(
            fit_trend(&recs, TransformKind::Probit),
            Err(Error::Degenerate(_))
        ));
        assert!(fit_trend(&recs[..1], TransformKind::Linear).is_err());
    }

    #[test]
    fn exact_extremes_are_excluded() {
        let mut recs = on_line(&[-1.0, 0.0, 1.0], 1.0, 0.0);
        recs.push(exact_record("perfect", 1.0, 0.9));
        let fit = fit_trend(&recs, TransformKind::Probit).unwrap();
        assert_eq!(fit.n_points, 3);
        let fit = fit_trend(&recs, TransformKind::Linear).unwrap();
        assert_eq!(fit.n_points, 4);
    }

    #[test]
    fn residuals() {
        let recs = on_line(&[-1.0, 0.0, 1.0], 0.7, -0.5);
        let fit = fit_trend(&recs, TransformKind::Probit).unwrap();
        assert!(effective_robustness(&recs[1], &fit).unwrap().abs() < 1e-12);
        let above = exact_record("above", normal_cdf(0.4), normal_cdf(0.7 * 0.4 - 0.5 + 1.0));
        assert!((effective_robustness(&above, &fit).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn order_invariance_is_exact() {
        let recs = on_line(&[0.3, -1.2, 0.8, 2.0, -0.1], 0.9, 0.2);
        let mut shuffled = recs.clone();
        shuffled.reverse();
        shuffled.swap(0, 2);
        let a = fit_trend(&recs, TransformKind::Logit).unwrap();
        let b = fit_trend(&shuffled, TransformKind::Logit).unwrap();
        assert_eq!(a, b);
    }
}
