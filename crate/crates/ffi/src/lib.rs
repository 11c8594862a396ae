//! C ABI over `shiftline`.
//!
//! Conventions shared by every function:
//!
//! * Fallible calls return a [`ShlStatus`]; results go through out-pointers,
//!   which are written only on `SHL_STATUS_OK`.
//! * On failure the message is available from [`shl_last_error_message`]
//!   on the same thread until the next failing call.
//! * Handles (`ShlRecords`, `ShlConfig`, `ShlResult`) are opaque, owned by
//!   the caller once returned, and released with their `*_free` function.
//!   Passing NULL to a `*_free` function is a no-op.
//! * Strings are NUL-terminated UTF-8.
//! * Panics never cross the boundary; they surface as `SHL_STATUS_PANIC`.
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use shiftline::gaussian_shift::theorem_bound;
use shiftline::io::{load_config, parse_config, read_results_file, write_run, ResultRow};
use shiftline::numerics::{apply_transform, normal_cdf, probit, TransformKind};
use shiftline::scenarios::{run_scenario, ScenarioConfig, ScenarioResult};
use shiftline::stats::{clopper_pearson, fit_trend, EvalRecord, MetricEstimate, TrendFit};
use shiftline::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Domain = 3,
    Degenerate = 4,
    Incompatible = 5,
    DimensionMismatch = 6,
    ZeroClassifier = 7,
    NonConvergence = 8,
    Config = 9,
    Schema = 10,
    Io = 11,
    Panic = 12,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShlTransform {
    Linear = 0,
    Probit = 1,
    Logit = 2,
}

impl From<ShlTransform> for TransformKind {
    fn from(t: ShlTransform) -> Self {
        match t {
            ShlTransform::Linear => TransformKind::Linear,
            ShlTransform::Probit => TransformKind::Probit,
            ShlTransform::Logit => TransformKind::Logit,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ShlTrendFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

impl From<&TrendFit> for ShlTrendFit {
    fn from(f: &TrendFit) -> Self {
        ShlTrendFit {
            slope: f.slope,
            intercept: f.intercept,
            r_squared: f.r_squared,
            n_points: f.n_points,
        }
    }
}

/// One record's metrics. `n_id`/`n_ood` are 0 for exact accuracies.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ShlPoint {
    pub acc_id: f64,
    pub acc_id_ci_lo: f64,
    pub acc_id_ci_hi: f64,
    pub acc_ood: f64,
    pub acc_ood_ci_lo: f64,
    pub acc_ood_ci_hi: f64,
    pub n_id: u64,
    pub n_ood: u64,
}

/// A list of evaluation records.
pub struct ShlRecords(Vec<EvalRecord>);

/// A validated scenario config.
pub struct ShlConfig(ScenarioConfig);

/// The outcome of a scenario run.
pub struct ShlResult(ScenarioResult);

struct Failure(ShlStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Domain(_) => ShlStatus::Domain,
            Error::Degenerate(_) => ShlStatus::Degenerate,
            Error::Incompatible(_) => ShlStatus::Incompatible,
            Error::DimensionMismatch { .. } => ShlStatus::DimensionMismatch,
            Error::ZeroClassifier => ShlStatus::ZeroClassifier,
            Error::NonConvergence { .. } => ShlStatus::NonConvergence,
            Error::Config(_) => ShlStatus::Config,
            Error::Schema { .. } => ShlStatus::Schema,
            Error::Io { .. } => ShlStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(msg));
}

fn call(f: impl FnOnce() -> Result<(), Failure>) -> ShlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ShlStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            ShlStatus::Panic
        }
    }
}

fn null(name: &str) -> Failure {
    Failure(ShlStatus::NullPointer, format!("`{name}` is NULL"))
}

unsafe fn arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(name))
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(ShlStatus::InvalidUtf8, format!("`{name}` is not UTF-8: {e}")))
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on this thread.
#[no_mangle]
pub extern "C" fn shl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub extern "C" fn shl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub extern "C" fn shl_normal_cdf(x: f64) -> f64 {
    normal_cdf(x)
}

#[no_mangle]
pub unsafe extern "C" fn shl_probit(p: f64, result: *mut f64) -> ShlStatus {
    call(|| {
        let result = out(result, "result")?;
        *result = probit(p)?;
        Ok(())
    })
}

/// Transform an accuracy. With `clamp_n > 0`, values at 0 or 1 are first
/// moved half a sample inside the interval.
#[no_mangle]
pub unsafe extern "C" fn shl_transform(p: f64, kind: ShlTransform, clamp_n: u64, result: *mut f64) -> ShlStatus {
    call(|| {
        let result = out(result, "result")?;
        *result = apply_transform(p, kind.into(), (clamp_n > 0).then_some(clamp_n))?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn shl_clopper_pearson(
    successes: u64,
    n: u64,
    confidence: f64,
    lo: *mut f64,
    hi: *mut f64,
) -> ShlStatus {
    call(|| {
        let (lo, hi) = (out(lo, "lo")?, out(hi, "hi")?);
        (*lo, *hi) = clopper_pearson(successes, n, confidence)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn shl_theorem_bound(
    beta: f64,
    gamma: f64,
    sigma: f64,
    d: usize,
    confidence_delta: f64,
    result: *mut f64,
) -> ShlStatus {
    call(|| {
        let result = out(result, "result")?;
        *result = theorem_bound(beta, gamma, sigma, d, confidence_delta)?;
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn shl_records_new() -> *mut ShlRecords {
    boxed(ShlRecords(Vec::new()))
}

fn push(records: &mut ShlRecords, id: MetricEstimate, ood: MetricEstimate) {
    let model_id = format!("record-{:06}", records.0.len());
    records.0.push(EvalRecord::new(model_id, "external", id, ood));
}

/// Append a record with exact (closed-form) accuracies.
#[no_mangle]
pub unsafe extern "C" fn shl_records_push_exact(records: *mut ShlRecords, acc_id: f64, acc_ood: f64) -> ShlStatus {
    call(|| {
        let records = out(records, "records")?;
        let (id, ood) = (MetricEstimate::exact(acc_id)?, MetricEstimate::exact(acc_ood)?);
        push(records, id, ood);
        Ok(())
    })
}

/// Append a record from correct-prediction counts, with Clopper-Pearson
/// intervals at `confidence`.
#[no_mangle]
pub unsafe extern "C" fn shl_records_push_counts(
    records: *mut ShlRecords,
    correct_id: u64,
    n_id: u64,
    correct_ood: u64,
    n_ood: u64,
    confidence: f64,
) -> ShlStatus {
    call(|| {
        let records = out(records, "records")?;
        let id = MetricEstimate::from_counts(correct_id, n_id, confidence)?;
        let ood = MetricEstimate::from_counts(correct_ood, n_ood, confidence)?;
        push(records, id, ood);
        Ok(())
    })
}

/// Read the scored rows of a results CSV; skipped rows are dropped.
#[no_mangle]
pub unsafe extern "C" fn shl_records_read_csv(path: *const c_char, records: *mut *mut ShlRecords) -> ShlStatus {
    call(|| {
        let path = str_arg(path, "path")?;
        let records = out(records, "records")?;
        let rows = read_results_file(Path::new(path))?;
        let scored = rows
            .into_iter()
            .filter_map(|row| match row {
                ResultRow::Scored(r) => Some(r),
                ResultRow::Skipped(_) => None,
            })
            .collect();
        *records = boxed(ShlRecords(scored));
        Ok(())
    })
}

/// Number of records; 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn shl_records_len(records: *const ShlRecords) -> usize {
    records.as_ref().map_or(0, |r| r.0.len())
}

#[no_mangle]
pub unsafe extern "C" fn shl_records_get(records: *const ShlRecords, index: usize, point: *mut ShlPoint) -> ShlStatus {
    call(|| {
        let records = arg(records, "records")?;
        let point = out(point, "point")?;
        let r = records.0.get(index).ok_or_else(|| {
            Failure(
                ShlStatus::Domain,
                format!("index {index} out of range for {} records", records.0.len()),
            )
        })?;
        let (a, b) = (&r.metric_id, &r.metric_ood);
        *point = ShlPoint {
            acc_id: a.value.get(),
            acc_id_ci_lo: a.ci_lo.get(),
            acc_id_ci_hi: a.ci_hi.get(),
            acc_ood: b.value.get(),
            acc_ood_ci_lo: b.ci_lo.get(),
            acc_ood_ci_hi: b.ci_hi.get(),
            n_id: a.n.unwrap_or(0),
            n_ood: b.n.unwrap_or(0),
        };
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn shl_records_free(records: *mut ShlRecords) {
    free(records)
}

#[no_mangle]
pub unsafe extern "C" fn shl_fit_trend(
    records: *const ShlRecords,
    transform: ShlTransform,
    fit: *mut ShlTrendFit,
) -> ShlStatus {
    call(|| {
        let records = arg(records, "records")?;
        let fit = out(fit, "fit")?;
        *fit = (&fit_trend(&records.0, transform.into())?).into();
        Ok(())
    })
}

/// Parse a TOML scenario config.
#[no_mangle]
pub unsafe extern "C" fn shl_config_parse(text: *const c_char, config: *mut *mut ShlConfig) -> ShlStatus {
    call(|| {
        let text = str_arg(text, "text")?;
        let config = out(config, "config")?;
        *config = boxed(ShlConfig(parse_config(text)?));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn shl_config_load(path: *const c_char, config: *mut *mut ShlConfig) -> ShlStatus {
    call(|| {
        let path = str_arg(path, "path")?;
        let config = out(config, "config")?;
        *config = boxed(ShlConfig(load_config(Path::new(path))?));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn shl_config_set_seed(config: *mut ShlConfig, seed: u64) -> ShlStatus {
    call(|| {
        out(config, "config")?.0.seed = seed;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn shl_config_free(config: *mut ShlConfig) {
    free(config)
}

/// Run the scenario described by `config`. `threads == 0` uses the default
/// worker pool; results do not depend on the thread count.
#[no_mangle]
pub unsafe extern "C" fn shl_scenario_run(
    config: *const ShlConfig,
    threads: usize,
    result: *mut *mut ShlResult,
) -> ShlStatus {
    call(|| {
        let config = arg(config, "config")?;
        let result = out(result, "result")?;
        let run = run_scenario(&config.0, (threads > 0).then_some(threads))?;
        *result = boxed(ShlResult(run));
        Ok(())
    })
}

/// Copy of the scored records of a run, sorted by model id.
#[no_mangle]
pub unsafe extern "C" fn shl_result_records(result: *const ShlResult, records: *mut *mut ShlRecords) -> ShlStatus {
    call(|| {
        let result = arg(result, "result")?;
        let records = out(records, "records")?;
        *records = boxed(ShlRecords(result.0.records.clone()));
        Ok(())
    })
}

/// Trend fitted over one record group of a run (`"all"` covers every record).
#[no_mangle]
pub unsafe extern "C" fn shl_result_fit(
    result: *const ShlResult,
    group: *const c_char,
    fit: *mut ShlTrendFit,
) -> ShlStatus {
    call(|| {
        let result = arg(result, "result")?;
        let group = str_arg(group, "group")?;
        let fit = out(fit, "fit")?;
        let found = result
            .0
            .fit(group)
            .ok_or_else(|| Failure(ShlStatus::Domain, format!("no fit for group `{group}`")))?;
        *fit = found.into();
        Ok(())
    })
}

/// Write records.csv and fit.json (and scatter.svg if `plot`) into `out_dir`.
#[no_mangle]
pub unsafe extern "C" fn shl_result_write(result: *const ShlResult, out_dir: *const c_char, plot: bool) -> ShlStatus {
    call(|| {
        let result = arg(result, "result")?;
        let out_dir = str_arg(out_dir, "out_dir")?;
        write_run(&result.0, Path::new(out_dir), plot)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn shl_result_free(result: *mut ShlResult) {
    free(result)
}
