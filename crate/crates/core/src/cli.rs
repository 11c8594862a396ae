//! The `shiftline` command line.
//!
//! Exit codes: 0 on success, 2 when an input (arguments, config, results
//! file) is invalid, 3 when a run fails or an output cannot be written.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::Error;
use crate::io::{
    load_config, read_results_file, write_json, write_results_file, write_run, FitSummary, ResultRow, EXTERNAL_SCENARIO,
};
use crate::numerics::TransformKind;
use crate::scenarios::run_scenario;
use crate::stats::{fit_trend, interpolate_with_random, EvalRecord, MetricEstimate};

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_RUNTIME: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "shiftline", version, about = "Simulate and analyze accuracy-on-the-line trends")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario config; writes records.csv and fit.json (and scatter.svg with --plot).
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        plot: bool,
        /// Worker threads; results do not depend on this.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Fit a trend line to a results CSV.
    Analyze {
        #[arg(long)]
        records: PathBuf,
        #[arg(long, default_value = "probit")]
        transform: TransformKind,
        #[arg(long)]
        out: PathBuf,
    },
    /// Trace the mixture of a model with a uniform random guesser.
    Interpolate {
        #[arg(long)]
        acc_id: f64,
        #[arg(long)]
        acc_ood: f64,
        #[arg(long)]
        classes: u32,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

/// A failed command with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: Error,
}

fn input(error: Error) -> Failure {
    Failure {
        code: EXIT_INPUT,
        error,
    }
}

fn runtime(error: Error) -> Failure {
    Failure {
        code: EXIT_RUNTIME,
        error,
    }
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate {
            config,
            out,
            plot,
            threads,
        } => simulate(&config, &out, plot, threads),
        Command::Analyze {
            records,
            transform,
            out,
        } => analyze(&records, transform, &out),
        Command::Interpolate {
            acc_id,
            acc_ood,
            classes,
            steps,
            out,
        } => interpolate(acc_id, acc_ood, classes, steps, &out),
    }
}

pub fn simulate(config_path: &Path, out_dir: &Path, plot: bool, threads: Option<usize>) -> Result<(), Failure> {
    let config = load_config(config_path).map_err(input)?;
    let result = run_scenario(&config, threads).map_err(|e| match e {
        Error::Config(_) => input(e),
        other => runtime(other),
    })?;
    write_run(&result, out_dir, plot).map_err(runtime)
}

pub fn analyze(records_path: &Path, transform: TransformKind, out: &Path) -> Result<(), Failure> {
    let records: Vec<EvalRecord> = read_results_file(records_path)
        .map_err(input)?
        .into_iter()
        .filter_map(|row| match row {
            ResultRow::Scored(r) => Some(r),
            ResultRow::Skipped(_) => None,
        })
        .collect();
    let fit = fit_trend(&records, transform).map_err(input)?;
    write_json(out, &FitSummary::new(EXTERNAL_SCENARIO, "all", None, &fit)).map_err(runtime)
}

pub fn interpolate(acc_id: f64, acc_ood: f64, classes: u32, steps: usize, out: &Path) -> Result<(), Failure> {
    if steps < 2 {
        return Err(input(Error::domain(format!("steps must be at least 2, got {steps}"))));
    }
    let ps: Vec<f64> = (0..steps).map(|i| i as f64 / (steps - 1) as f64).collect();
    let trace = interpolate_with_random(acc_id, acc_ood, classes, &ps).map_err(input)?;
    let width = (steps - 1).to_string().len();
    let rows = ps
        .iter()
        .zip(&trace)
        .enumerate()
        .map(|(i, (p, &(a, b)))| {
            let record = EvalRecord::new(
                format!("step-{i:0width$}"),
                "interpolation",
                MetricEstimate::exact(a)?,
                MetricEstimate::exact(b)?,
            );
            Ok(ResultRow::Scored(record.with_param("p", p)))
        })
        .collect::<crate::Result<Vec<_>>>()
        .map_err(input)?;
    write_results_file(out, &rows).map_err(runtime)
}

/// Entry point for the binary.
pub fn main() -> ExitCode {
    env_logger::Builder::new()
        .filter_level(log::LevelFilter::Warn)
        .format_timestamp(None)
        .init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, error }) => {
            eprintln!("error: {error}");
            ExitCode::from(code)
        }
    }
}
