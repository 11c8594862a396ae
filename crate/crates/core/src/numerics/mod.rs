//! Special functions: the standard normal CDF and its inverse, the logit
//! pair, axis-transform dispatch, and the binomial/beta machinery used by
//! exact confidence intervals.
//!
//! Everything here is a pure function of its arguments.

mod beta;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use beta::{binomial_cdf, binomial_sf, ln_beta, regularized_incomplete_beta};

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// A value in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const HALF: Probability = Probability(0.5);
    pub const ONE: Probability = Probability(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Probability(value))
        } else {
            Err(Error::domain(format!("probability {value} outside [0, 1]")))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Probability {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Probability::new(value)
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Axis scaling applied to accuracies before trends are fitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformKind {
    Linear,
    Probit,
    Logit,
}

impl TransformKind {
    pub const ALL: [TransformKind; 3] = [
        TransformKind::Linear,
        TransformKind::Probit,
        TransformKind::Logit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TransformKind::Linear => "linear",
            TransformKind::Probit => "probit",
            TransformKind::Logit => "logit",
        }
    }

    /// Map a transformed value back to a probability.
    pub fn inverse(self, y: f64) -> f64 {
        match self {
            TransformKind::Linear => y,
            TransformKind::Probit => normal_cdf(y),
            TransformKind::Logit => inv_logit(y),
        }
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TransformKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(TransformKind::Linear),
            "probit" => Ok(TransformKind::Probit),
            "logit" => Ok(TransformKind::Logit),
            other => Err(Error::domain(format!(
                "unknown transform `{other}` (expected linear, probit or logit)"
            ))),
        }
    }
}

/// Standard normal CDF.
///
/// Evaluated through `erfc` on the side of the origin where the result is
/// small, so the lower tail keeps full relative precision.
pub fn normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Upper tail `1 - Φ(x)` without cancellation.
pub fn normal_sf(x: f64) -> f64 {
    normal_cdf(-x)
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / SQRT_2PI
}

/// Inverse of [`normal_cdf`] on the open interval `(0, 1)`.
pub fn probit(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("probit undefined at p = {p}")));
    }
    // Work in the lower half so that the tail probability is represented
    // exactly; 1 - p is exact for p >= 0.5.
    if p > 0.5 {
        Ok(-lower_probit(1.0 - p))
    } else {
        Ok(lower_probit(p))
    }
}

/// Probit for `0 < q <= 0.5`.
fn lower_probit(q: f64) -> f64 {
    if q == 0.5 {
        return 0.0;
    }
    let mut x = acklam_initial(q);
    // Halley refinement against the CDF.
    for _ in 0..2 {
        let err = normal_cdf(x) - q;
        let u = err * SQRT_2PI * (0.5 * x * x).exp();
        x -= u / (1.0 + 0.5 * x * u);
    }
    x
}

/// Acklam's rational approximation for the lower half (relative error
/// around 1e-9).
fn acklam_initial(q: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;

    if q < P_LOW {
        let r = (-2.0 * q.ln()).sqrt();
        (((((C[0] * r + C[1]) * r + C[2]) * r + C[3]) * r + C[4]) * r + C[5])
            / ((((D[0] * r + D[1]) * r + D[2]) * r + D[3]) * r + 1.0)
    } else {
        let s = q - 0.5;
        let r = s * s;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * s
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// `ln(p / (1 - p))`.
pub fn logit(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("logit undefined at p = {p}")));
    }
    Ok(p.ln() - (-p).ln_1p())
}

pub fn inv_logit(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Clamp `p` into `[1/(2n), 1 - 1/(2n)]`.
pub fn continuity_clamp(p: f64, n: u64) -> f64 {
    let eps = 0.5 / n as f64;
    p.clamp(eps, 1.0 - eps)
}

/// Apply an axis transform, optionally clamping degenerate accuracies using
/// the sample size `clamp_n` that produced them.
pub fn apply_transform(p: f64, kind: TransformKind, clamp_n: Option<u64>) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("probability {p} outside [0, 1]")));
    }
    if clamp_n == Some(0) {
        return Err(Error::domain("clamp sample size must be positive"));
    }
    let p = match clamp_n {
        Some(n) => continuity_clamp(p, n),
        None => p,
    };
    match kind {
        TransformKind::Linear => Ok(p),
        TransformKind::Probit => probit(p),
        TransformKind::Logit => logit(p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // mpmath, 40 digits
    const PHI_1: f64 = 0.841_344_746_068_542_9;
    const PHI_MINUS_8: f64 = 6.220_960_574_271_784e-16;

    #[test]
    fn cdf_reference_values() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert!((normal_cdf(1.0) - PHI_1).abs() < 1e-15);
        assert!((normal_cdf(1.0) - 0.841_345).abs() < 1e-6);
        assert!((normal_cdf(-8.0) / PHI_MINUS_8 - 1.0).abs() < 1e-12);
        assert!(normal_cdf(40.0) >= 1.0 - 1e-300);
        assert_eq!(normal_cdf(-40.0), 0.0);
    }

    #[test]
    fn probit_reference_values() {
        assert_eq!(probit(0.5).unwrap(), 0.0);
        assert!((probit(PHI_1).unwrap() - 1.0).abs() < 1e-9);
        assert!((probit(0.975).unwrap() - 1.959_963_984_540_054).abs() < 1e-12);
        assert!((probit(0.995).unwrap() - 2.575_829_303_548_901).abs() < 1e-12);
        assert!((probit(1e-10).unwrap() + 6.361_340_902_404_056).abs() < 1e-10);
    }

    #[test]
    fn probit_domain() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(probit(p).is_err(), "p = {p}");
        }
    }

    #[test]
    fn probit_is_odd() {
        for &p in &[1e-12, 1e-6, 0.01, 0.2, 0.4999] {
            assert_eq!(probit(1.0 - p).unwrap(), -probit(1.0 - (1.0 - p)).unwrap());
        }
    }

    #[test]
    fn logit_values() {
        assert_eq!(logit(0.5).unwrap(), 0.0);
        assert_eq!(inv_logit(0.0), 0.5);
        assert!((logit(0.9).unwrap() - 2.197_224_577_336_219_4).abs() < 1e-12);
        assert!(logit(0.0).is_err());
        assert!(logit(1.0).is_err());
        assert!(inv_logit(-800.0) >= 0.0 && inv_logit(800.0) <= 1.0);
    }

    #[test]
    fn transform_dispatch() {
        assert_eq!(apply_transform(0.5, TransformKind::Probit, None).unwrap(), 0.0);
        assert_eq!(apply_transform(0.7, TransformKind::Linear, None).unwrap(), 0.7);
        assert_eq!(
            apply_transform(1.0, TransformKind::Probit, Some(100)).unwrap(),
            probit(0.995).unwrap()
        );
        assert_eq!(
            apply_transform(0.0, TransformKind::Logit, Some(100)).unwrap(),
            logit(0.005).unwrap()
        );
        assert!(apply_transform(1.0, TransformKind::Probit, None).is_err());
        assert!(apply_transform(0.0, TransformKind::Logit, None).is_err());
        assert_eq!(apply_transform(1.0, TransformKind::Linear, None).unwrap(), 1.0);
    }

    #[test]
    fn transform_names_round_trip() {
        for kind in TransformKind::ALL {
            assert_eq!(kind.name().parse::<TransformKind>().unwrap(), kind);
        }
        assert!("cubic".parse::<TransformKind>().is_err());
    }

    #[test]
    fn probability_newtype() {
        assert!(Probability::new(1.2).is_err());
        assert!(Probability::new(f64::NAN).is_err());
        assert_eq!(Probability::new(0.25).unwrap().get(), 0.25);
    }
}
