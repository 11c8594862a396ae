//! Evaluation methodology: exact binomial intervals, the macro-F1 interval
//! heuristic, trend fitting in a transformed domain, effective robustness,
//! and the probit-affine correlation check.

mod correlation;
mod interval;
mod record;
mod trend;

pub use correlation::{check_correlation_property, interpolate_with_random, CorrelationTransform};
pub use interval::{clopper_pearson, macro_f1_ci, PerClassF1};
pub use record::{parse_hyperparams, EvalRecord, MetricEstimate};
pub use trend::{effective_robustness, fit_points, fit_trend, TrendFit};
