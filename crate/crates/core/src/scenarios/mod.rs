//! Experiment runners for the simulated shift settings.
//!
//! Every runner is a pure function of its [`ScenarioConfig`]. All random
//! draws come from generators derived from the master seed and a fixed
//! `(tag, index)` per use, and grid cells are evaluated independently, so
//! results do not depend on the number of worker threads.

mod config;
mod grid;
mod result;
mod runners;

pub use config::{
    CovarianceShiftKind, DataConfig, DiagonalSpec, GridConfig, ScenarioConfig, ScenarioKind, ShiftConfig,
    TaskConfig,
};
pub use grid::{covariance_setup, mean_shift_setup, CovarianceSetup, MeanShiftSetup};
pub use result::{GroupFit, ModelDiagnostic, ScenarioResult, SkippedModel};
pub use runners::{run_adversarial, run_covariance_shift, run_main_trend, run_matched_noise, run_more_data};

use crate::error::{Error, Result};

/// Run the scenario named by `config.kind`. `threads` caps the worker pool;
/// `None` uses the global pool.
pub fn run_scenario(config: &ScenarioConfig, threads: Option<usize>) -> Result<ScenarioResult> {
    let run = || match config.kind {
        ScenarioKind::MainTrend => run_main_trend(config),
        ScenarioKind::MoreData => run_more_data(config),
        ScenarioKind::Adversarial => run_adversarial(config),
        ScenarioKind::CovarianceShift => run_covariance_shift(config),
        ScenarioKind::MatchedNoise => run_matched_noise(config),
    };
    match threads {
        None => run(),
        Some(0) => Err(Error::Config("thread count must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {n} worker threads: {e}")))?
            .install(run),
    }
}
