use std::ffi::{CStr, CString};
use std::ptr;

use shiftline_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(shl_last_error_message()) }.to_string_lossy().into_owned()
}

const SMALL_RUN: &str = r#"
kind = "main_trend"
seed = 5
[task]
d = 400
sigma = 0.5
[grid]
knn_k = []
forest_trees = []
[data]
n_train = 60
n_sub = [30, 60]
d_proj = [50, 200]
n_test = 500
"#;

#[test]
fn scenario_round_trip_through_handles() {
    let text = CString::new(SMALL_RUN).unwrap();
    let mut config = ptr::null_mut();
    assert_eq!(unsafe { shl_config_parse(text.as_ptr(), &mut config) }, ShlStatus::Ok);
    let mut run_a = ptr::null_mut();
    let mut run_b = ptr::null_mut();
    unsafe {
        assert_eq!(shl_scenario_run(config, 1, &mut run_a), ShlStatus::Ok);
        assert_eq!(shl_scenario_run(config, 3, &mut run_b), ShlStatus::Ok);
    }

    let group = CString::new("linear").unwrap();
    let (mut fa, mut fb) = (ShlTrendFit::default(), ShlTrendFit::default());
    unsafe {
        assert_eq!(shl_result_fit(run_a, group.as_ptr(), &mut fa), ShlStatus::Ok);
        assert_eq!(shl_result_fit(run_b, group.as_ptr(), &mut fb), ShlStatus::Ok);
    }
    assert_eq!(fa, fb);

    let mut records = ptr::null_mut();
    assert_eq!(unsafe { shl_result_records(run_a, &mut records) }, ShlStatus::Ok);
    let n = unsafe { shl_records_len(records) };
    assert!(n > 0);
    let mut point = ShlPoint::default();
    for i in 0..n {
        assert_eq!(unsafe { shl_records_get(records, i, &mut point) }, ShlStatus::Ok);
        assert!(point.acc_id_ci_lo <= point.acc_id && point.acc_id <= point.acc_id_ci_hi);
    }
    assert_eq!(unsafe { shl_records_get(records, n, &mut point) }, ShlStatus::Domain);

    let dir = tempfile::tempdir().unwrap();
    let out = CString::new(dir.path().to_str().unwrap()).unwrap();
    assert_eq!(unsafe { shl_result_write(run_a, out.as_ptr(), true) }, ShlStatus::Ok);
    for file in ["records.csv", "fit.json", "scatter.svg"] {
        assert!(dir.path().join(file).exists(), "{file}");
    }

    // Rereading the CSV reproduces the "all" fit.
    let csv = CString::new(dir.path().join("records.csv").to_str().unwrap()).unwrap();
    let mut reread = ptr::null_mut();
    let all = CString::new("all").unwrap();
    let (mut fit_all, mut fit_csv) = (ShlTrendFit::default(), ShlTrendFit::default());
    unsafe {
        assert_eq!(shl_records_read_csv(csv.as_ptr(), &mut reread), ShlStatus::Ok);
        assert_eq!(shl_result_fit(run_a, all.as_ptr(), &mut fit_all), ShlStatus::Ok);
        assert_eq!(shl_fit_trend(reread, ShlTransform::Probit, &mut fit_csv), ShlStatus::Ok);
    }
    assert_eq!(fit_all, fit_csv);

    let missing = CString::new("nope").unwrap();
    assert_eq!(unsafe { shl_result_fit(run_a, missing.as_ptr(), &mut fa) }, ShlStatus::Domain);

    unsafe {
        shl_records_free(records);
        shl_records_free(reread);
        shl_result_free(run_a);
        shl_result_free(run_b);
        shl_config_free(config);
    }
}

#[test]
fn error_codes_and_messages() {
    let mut config = ptr::null_mut();
    let text = CString::new("kind = \"main_trend\"\n[task]\nd = \"x\"\n").unwrap();
    assert_eq!(unsafe { shl_config_parse(text.as_ptr(), &mut config) }, ShlStatus::Config);
    assert!(config.is_null());
    assert!(last_error().contains("line 3"), "{}", last_error());

    let path = CString::new("/nonexistent/shiftline.toml").unwrap();
    assert_eq!(unsafe { shl_config_load(path.as_ptr(), &mut config) }, ShlStatus::Io);

    let bad = [0xffu8, 0];
    assert_eq!(
        unsafe { shl_config_parse(bad.as_ptr().cast(), &mut config) },
        ShlStatus::InvalidUtf8
    );
    assert_eq!(unsafe { shl_config_parse(ptr::null(), &mut config) }, ShlStatus::NullPointer);

    let records = shl_records_new();
    let mut fit = ShlTrendFit::default();
    assert_eq!(unsafe { shl_fit_trend(records, ShlTransform::Probit, &mut fit) }, ShlStatus::Degenerate);
    assert_eq!(unsafe { shl_records_push_counts(records, 5, 4, 1, 4, 0.95) }, ShlStatus::Domain);
    assert_eq!(unsafe { shl_records_len(records) }, 0);
    assert_eq!(unsafe { shl_records_len(ptr::null()) }, 0);
    unsafe { shl_records_free(records) };
}

#[test]
fn scalar_functions_match_core() {
    let (mut lo, mut hi) = (0.0, 0.0);
    assert_eq!(unsafe { shl_clopper_pearson(0, 10, 0.95, &mut lo, &mut hi) }, ShlStatus::Ok);
    assert_eq!(lo, 0.0);
    assert!((hi - (1.0 - 0.025f64.powf(0.1))).abs() < 1e-9);

    let mut v = 0.0;
    assert_eq!(unsafe { shl_transform(1.0, ShlTransform::Probit, 200, &mut v) }, ShlStatus::Ok);
    let mut expected = 0.0;
    assert_eq!(unsafe { shl_probit(1.0 - 1.0 / 400.0, &mut expected) }, ShlStatus::Ok);
    assert_eq!(v, expected);
    assert_eq!(unsafe { shl_transform(1.0, ShlTransform::Logit, 0, &mut v) }, ShlStatus::Domain);

    assert_eq!(unsafe { shl_theorem_bound(0.5, 1.0, 10f64.powf(-1.5), 100_000, 0.01, &mut v) }, ShlStatus::Ok);
    assert!((v - 0.16276).abs() < 5e-6);
}
