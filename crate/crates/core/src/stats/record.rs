use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::interval::clopper_pearson;
use crate::error::{Error, Result};
use crate::numerics::{apply_transform, Probability, TransformKind};

/// A probability-valued metric with its confidence interval.
///
/// `n` is the number of evaluation samples behind the estimate; exact
/// (closed-form) metrics have no sample size and a zero-width interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricEstimate {
    pub value: Probability,
    pub n: Option<u64>,
    pub ci_lo: Probability,
    pub ci_hi: Probability,
}

impl MetricEstimate {
    pub fn exact(value: f64) -> Result<Self> {
        let value = Probability::new(value)?;
        Ok(MetricEstimate {
            value,
            n: None,
            ci_lo: value,
            ci_hi: value,
        })
    }

    /// Empirical accuracy from `successes` out of `n` with a Clopper-Pearson
    /// interval at `confidence`.
    pub fn from_counts(successes: u64, n: u64, confidence: f64) -> Result<Self> {
        let (lo, hi) = clopper_pearson(successes, n, confidence)?;
        Ok(MetricEstimate {
            value: Probability::new(successes as f64 / n as f64)?,
            n: Some(n),
            ci_lo: Probability::new(lo)?,
            ci_hi: Probability::new(hi)?,
        })
    }

    /// Explicit construction; checks `ci_lo <= value <= ci_hi`.
    pub fn with_interval(value: f64, n: Option<u64>, ci_lo: f64, ci_hi: f64) -> Result<Self> {
        if n == Some(0) {
            return Err(Error::domain("metric sample size must be at least 1"));
        }
        if !(ci_lo <= value && value <= ci_hi) {
            return Err(Error::domain(format!(
                "interval [{ci_lo}, {ci_hi}] does not contain {value}"
            )));
        }
        Ok(MetricEstimate {
            value: Probability::new(value)?,
            n,
            ci_lo: Probability::new(ci_lo)?,
            ci_hi: Probability::new(ci_hi)?,
        })
    }

    pub fn is_exact(&self) -> bool {
        self.n.is_none()
    }

    pub fn transformed(&self, kind: TransformKind) -> Result<f64> {
        apply_transform(self.value.get(), kind, self.n)
    }

    /// Whether this metric can enter a fit under `kind` (exact 0/1 values
    /// cannot be probit/logit transformed).
    pub fn is_transformable(&self, kind: TransformKind) -> bool {
        kind == TransformKind::Linear
            || self.n.is_some()
            || (self.value.get() > 0.0 && self.value.get() < 1.0)
    }
}

/// One model's paired in-distribution / out-of-distribution evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub model_id: String,
    pub family: String,
    pub hyperparams: BTreeMap<String, String>,
    pub metric_id: MetricEstimate,
    pub metric_ood: MetricEstimate,
}

impl EvalRecord {
    pub fn new(
        model_id: impl Into<String>,
        family: impl Into<String>,
        metric_id: MetricEstimate,
        metric_ood: MetricEstimate,
    ) -> Self {
        EvalRecord {
            model_id: model_id.into(),
            family: family.into(),
            hyperparams: BTreeMap::new(),
            metric_id,
            metric_ood,
        }
    }

    pub fn with_param(mut self, key: &str, value: impl ToString) -> Self {
        self.hyperparams.insert(key.to_string(), value.to_string());
        self
    }

    /// Canonical `k=v;k=v` rendering, keys sorted.
    pub fn hyperparam_string(&self) -> String {
        self.hyperparams
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }

    /// Transformed `(id, ood)` pair.
    pub fn transformed(&self, kind: TransformKind) -> Result<(f64, f64)> {
        Ok((self.metric_id.transformed(kind)?, self.metric_ood.transformed(kind)?))
    }

    pub fn is_exact(&self) -> bool {
        self.metric_id.is_exact() && self.metric_ood.is_exact()
    }
}

/// Parse a canonical `k=v;k=v` string.
pub fn parse_hyperparams(s: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for part in s.split(';').filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::domain(format!("hyperparameter `{part}` is not k=v")))?;
        out.insert(k.to_string(), v.to_string());
    }
    Ok(out)
}
