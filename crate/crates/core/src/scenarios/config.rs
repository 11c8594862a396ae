use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::{LearnerSpec, Penalty};
use crate::numerics::TransformKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    MainTrend,
    MoreData,
    Adversarial,
    CovarianceShift,
    MatchedNoise,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 5] = [
        ScenarioKind::MainTrend,
        ScenarioKind::MoreData,
        ScenarioKind::Adversarial,
        ScenarioKind::CovarianceShift,
        ScenarioKind::MatchedNoise,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::MainTrend => "main_trend",
            ScenarioKind::MoreData => "more_data",
            ScenarioKind::Adversarial => "adversarial",
            ScenarioKind::CovarianceShift => "covariance_shift",
            ScenarioKind::MatchedNoise => "matched_noise",
        }
    }

    /// Whether the scenario runs on a diagonal-covariance task.
    pub fn is_covariance(self) -> bool {
        matches!(self, ScenarioKind::CovarianceShift | ScenarioKind::MatchedNoise)
    }
}

impl std::fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scenario kind `{s}`")))
    }
}

/// Diagonal covariance with `n_small` entries of `small` at random positions
/// and `large` elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagonalSpec {
    pub n_small: usize,
    pub large: f64,
    pub small: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskConfig {
    pub d: usize,
    /// Isotropic noise level; unused by the covariance scenarios.
    pub sigma: f64,
    /// Present for the covariance scenarios only.
    pub covariance: Option<DiagonalSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovarianceShiftKind {
    /// `Σ' = Σ + s2·I`
    Add,
    /// `Σ' = κ·Σ`
    Scale,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftConfig {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Failure probability for the reported deviation bound.
    pub bound_delta: f64,
    /// Adversarial scale: `Δ = c·θ*/‖θ*‖`.
    pub c: f64,
    /// Position of θ* among the linear models in grid order; the middle one
    /// when absent.
    pub target_index: Option<usize>,
    /// Numbers of `D''` samples appended to the training set.
    pub aux_sizes: Vec<usize>,
    /// `σ'' = aux_sigma_factor · σ`
    pub aux_sigma_factor: f64,
    pub covariance: CovarianceShiftKind,
    pub s2: f64,
    pub kappa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub logistic_l2_c: Vec<f64>,
    pub logistic_l1_c: Vec<f64>,
    pub ridge_alpha: Vec<f64>,
    pub knn_k: Vec<usize>,
    pub forest_trees: Vec<usize>,
    pub forest_max_depth: Option<usize>,
}

impl GridConfig {
    /// Learners in grid order; forest seeds are filled in per cell.
    pub fn learners(&self) -> Vec<LearnerSpec> {
        let mut out = Vec::new();
        for &c in &self.logistic_l2_c {
            out.push(LearnerSpec::Logistic {
                penalty: Penalty::L2,
                inv_reg_c: c,
            });
        }
        for &c in &self.logistic_l1_c {
            out.push(LearnerSpec::Logistic {
                penalty: Penalty::L1,
                inv_reg_c: c,
            });
        }
        for &reg_alpha in &self.ridge_alpha {
            out.push(LearnerSpec::Ridge { reg_alpha });
        }
        for &k in &self.knn_k {
            out.push(LearnerSpec::Knn { k });
        }
        for &n_trees in &self.forest_trees {
            out.push(LearnerSpec::RandomForest {
                n_trees,
                max_depth: self.forest_max_depth,
                seed: 0,
            });
        }
        out
    }

    fn logistic_l2_only(c: Vec<f64>) -> Self {
        GridConfig {
            logistic_l2_c: c,
            logistic_l1_c: Vec::new(),
            ridge_alpha: Vec::new(),
            knn_k: Vec::new(),
            forest_trees: Vec::new(),
            forest_max_depth: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    pub n_train: usize,
    pub n_sub: Vec<usize>,
    pub d_proj: Vec<usize>,
    /// Monte Carlo test-set size for models without exact accuracies.
    pub n_test: u64,
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub seed: u64,
    pub transform: TransformKind,
    pub task: TaskConfig,
    pub shift: ShiftConfig,
    pub grid: GridConfig,
    pub data: DataConfig,
}

const MAIN_D: usize = 100_000;
const COV_D: usize = 500;

impl ScenarioConfig {
    /// Defaults for `kind`.
    pub fn defaults(kind: ScenarioKind) -> Self {
        let shift = ShiftConfig {
            alpha: 0.7,
            beta: 0.5,
            gamma: 1.0,
            bound_delta: 0.01,
            c: -0.03,
            target_index: None,
            aux_sizes: vec![0, 50, 100],
            aux_sigma_factor: std::f64::consts::SQRT_2,
            covariance: CovarianceShiftKind::Add,
            s2: 0.125,
            kappa: 1.25,
        };
        let logistic_c = vec![1e-6, 1e-4, 1e-2, 1.0];
        let main_grid = GridConfig {
            logistic_l2_c: logistic_c.clone(),
            logistic_l1_c: Vec::new(),
            ridge_alpha: vec![1e-3, 1e-1, 10.0],
            knn_k: vec![1, 3],
            forest_trees: vec![3, 30, 100],
            forest_max_depth: None,
        };
        let main_data = DataConfig {
            n_train: 100,
            n_sub: vec![30, 50, 100],
            d_proj: vec![50, 100, 300, 1000, 3000],
            n_test: 100_000,
            confidence: 0.95,
        };
        let isotropic_task = TaskConfig {
            d: MAIN_D,
            sigma: 10f64.powf(-1.5),
            covariance: None,
        };
        match kind {
            ScenarioKind::MainTrend | ScenarioKind::Adversarial => ScenarioConfig {
                kind,
                seed: 0,
                transform: TransformKind::Probit,
                task: isotropic_task,
                shift,
                grid: main_grid,
                data: main_data,
            },
            ScenarioKind::MoreData => ScenarioConfig {
                kind,
                seed: 0,
                transform: TransformKind::Probit,
                task: isotropic_task,
                shift,
                grid: GridConfig::logistic_l2_only(logistic_c),
                data: main_data,
            },
            ScenarioKind::CovarianceShift | ScenarioKind::MatchedNoise => ScenarioConfig {
                kind,
                seed: 0,
                transform: TransformKind::Probit,
                task: TaskConfig {
                    d: COV_D,
                    sigma: 10f64.powf(-1.5),
                    covariance: Some(DiagonalSpec {
                        n_small: 10,
                        large: 0.5,
                        small: 1.0 / 200.0,
                    }),
                },
                shift,
                grid: GridConfig {
                    logistic_l2_c: vec![1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0],
                    logistic_l1_c: vec![1e-2, 3e-2, 1e-1, 3e-1, 1.0],
                    ridge_alpha: vec![1e-3, 1e-2, 1e-1, 1.0, 10.0],
                    knn_k: Vec::new(),
                    forest_trees: Vec::new(),
                    forest_max_depth: None,
                },
                data: DataConfig {
                    n_train: 2000,
                    n_sub: vec![100, 200, 500, 1000, 2000],
                    d_proj: vec![COV_D],
                    n_test: 100_000,
                    confidence: 0.95,
                },
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        let t = &self.task;
        if t.d == 0 {
            return fail("task.d must be at least 1".into());
        }
        if !(t.sigma > 0.0 && t.sigma.is_finite()) {
            return fail(format!("task.sigma = {} must be positive", t.sigma));
        }
        match (&t.covariance, self.kind.is_covariance()) {
            (None, true) => return fail(format!("{} needs [task.covariance]", self.kind)),
            (Some(_), false) => return fail(format!("{} takes no [task.covariance]", self.kind)),
            (Some(cov), true) => {
                if cov.n_small > t.d {
                    return fail(format!("task.covariance.n_small = {} exceeds d = {}", cov.n_small, t.d));
                }
                if !(cov.large > 0.0 && cov.small > 0.0 && cov.large.is_finite() && cov.small.is_finite()) {
                    return fail("task.covariance variances must be positive".into());
                }
            }
            (None, false) => {}
        }

        let s = &self.shift;
        if !(s.alpha >= 0.0 && s.beta >= 0.0 && s.gamma > 0.0) {
            return fail("shift needs alpha >= 0, beta >= 0, gamma > 0".into());
        }
        if !(s.bound_delta > 0.0 && s.bound_delta < 1.0) {
            return fail(format!("shift.bound_delta = {} outside (0, 1)", s.bound_delta));
        }
        if !(-1.0..=1.0).contains(&s.c) {
            return fail(format!("shift.c = {} outside [-1, 1]", s.c));
        }
        if !(s.aux_sigma_factor > 0.0 && s.aux_sigma_factor.is_finite()) {
            return fail("shift.aux_sigma_factor must be positive".into());
        }
        if !(s.s2 >= 0.0 && s.s2.is_finite()) {
            return fail(format!("shift.s2 = {} must be non-negative", s.s2));
        }
        if !(s.kappa > 0.0 && s.kappa.is_finite()) {
            return fail(format!("shift.kappa = {} must be positive", s.kappa));
        }
        if self.kind == ScenarioKind::MoreData && s.aux_sizes.is_empty() {
            return fail("shift.aux_sizes must not be empty".into());
        }

        let g = &self.grid;
        for (name, values) in [
            ("grid.logistic_l2_c", &g.logistic_l2_c),
            ("grid.logistic_l1_c", &g.logistic_l1_c),
            ("grid.ridge_alpha", &g.ridge_alpha),
        ] {
            if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
                return fail(format!("{name} entry {v} must be positive"));
            }
        }
        if g.knn_k.contains(&0) || g.forest_trees.contains(&0) {
            return fail("grid.knn_k and grid.forest_trees entries must be at least 1".into());
        }
        if g.forest_max_depth == Some(0) {
            return fail("grid.forest_max_depth must be at least 1".into());
        }
        if g.learners().is_empty() {
            return fail("learner grid is empty".into());
        }

        let data = &self.data;
        if data.n_train == 0 {
            return fail("data.n_train must be at least 1".into());
        }
        if data.n_sub.is_empty() || data.d_proj.is_empty() {
            return fail("data.n_sub and data.d_proj must not be empty".into());
        }
        if let Some(n) = data.n_sub.iter().find(|&&n| n == 0 || n > data.n_train) {
            return fail(format!("data.n_sub entry {n} outside [1, n_train = {}]", data.n_train));
        }
        if let Some(k) = g.knn_k.iter().find(|&&k| data.n_sub.iter().any(|&n| k > n)) {
            return fail(format!("grid.knn_k entry {k} exceeds the smallest n_sub"));
        }
        if let Some(p) = data.d_proj.iter().find(|&&p| p == 0 || p > t.d) {
            return fail(format!("data.d_proj entry {p} outside [1, d = {}]", t.d));
        }
        if data.n_test == 0 {
            return fail("data.n_test must be at least 1".into());
        }
        if !(data.confidence > 0.0 && data.confidence < 1.0) {
            return fail(format!("data.confidence = {} outside (0, 1)", data.confidence));
        }
        Ok(())
    }
}
