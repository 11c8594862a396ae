use std::path::Path;
use std::process::{Command, Output};

use shiftline::io::{read_results_file, FitSummary, ResultRow};
use shiftline::numerics::probit;

const SMALL_MAIN: &str = r#"
kind = "main_trend"
seed = 9

[task]
d = 3000
sigma = 0.2

[grid]
forest_trees = [3]

[data]
n_sub = [30, 100]
d_proj = [100, 1000]
n_test = 3000
"#;

fn shiftline(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shiftline")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn fits(p: &Path) -> Vec<FitSummary> {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn fit(p: &Path) -> FitSummary {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn simulate_writes_outputs_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("main.toml");
    std::fs::write(&config, SMALL_MAIN).unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for (out, threads) in [(&a, "1"), (&b, "4")] {
        let o = shiftline(&["simulate", "--config", path(&config), "--out", path(out), "--plot", "--threads", threads]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for file in ["records.csv", "fit.json", "scatter.svg"] {
        let (x, y) = (std::fs::read(a.join(file)).unwrap(), std::fs::read(b.join(file)).unwrap());
        assert!(!x.is_empty());
        assert_eq!(x, y, "{file} differs between runs");
    }
    let summaries = fits(&a.join("fit.json"));
    let groups: Vec<&str> = summaries.iter().map(|f| f.group.as_str()).collect();
    assert_eq!(groups, ["all", "linear"]);
    assert!(summaries.iter().all(|f| f.seed == Some(9) && f.theoretical_slope == Some(0.7)));

    // Without --plot there is no SVG.
    let c = dir.path().join("c");
    assert!(shiftline(&["simulate", "--config", path(&config), "--out", path(&c)]).status.success());
    assert!(!c.join("scatter.svg").exists());
}

#[test]
fn analyze_reproduces_the_simulated_fit() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("main.toml");
    std::fs::write(&config, SMALL_MAIN).unwrap();
    let out = dir.path().join("run");
    assert!(shiftline(&["simulate", "--config", path(&config), "--out", path(&out)]).status.success());
    let simulated = fits(&out.join("fit.json")).into_iter().find(|f| f.group == "all").unwrap();

    let json = dir.path().join("probit.json");
    let o = shiftline(&["analyze", "--records", path(&out.join("records.csv")), "--transform", "probit", "--out", path(&json)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let analyzed = fit(&json);
    assert_eq!(analyzed.scenario, "external");
    assert_eq!(analyzed.n_points, simulated.n_points);
    assert!((analyzed.slope - simulated.slope).abs() <= 1e-9);
    assert!((analyzed.intercept - simulated.intercept).abs() <= 1e-9);
    assert!((analyzed.r_squared - simulated.r_squared).abs() <= 1e-9);

    let linear = dir.path().join("linear.json");
    let o = shiftline(&["analyze", "--records", path(&out.join("records.csv")), "--transform", "linear", "--out", path(&linear)]);
    assert!(o.status.success());
    assert_ne!(fit(&linear).r_squared, analyzed.r_squared);
}

#[test]
fn analyze_external_files() {
    let dir = tempfile::tempdir().unwrap();
    // collinear in the probit domain: probit(ood) = 0.5 probit(id) - 0.2
    let mut csv = String::from("model_id,acc_id,acc_ood\n");
    for (i, z) in [-1.0f64, -0.3, 0.4, 1.1, 1.9].iter().enumerate() {
        let id = shiftline::numerics::normal_cdf(*z);
        let ood = shiftline::numerics::normal_cdf(0.5 * z - 0.2);
        csv.push_str(&format!("m{i},{id},{ood}\n"));
    }
    let input = dir.path().join("ext.csv");
    std::fs::write(&input, csv).unwrap();
    let mut r2 = Vec::new();
    for t in ["linear", "probit", "logit"] {
        let out = dir.path().join(format!("{t}.json"));
        assert!(shiftline(&["analyze", "--records", path(&input), "--transform", t, "--out", path(&out)]).status.success());
        r2.push(fit(&out).r_squared);
    }
    assert!((r2[1] - 1.0).abs() < 1e-12);
    assert!(r2[0] < r2[1] && r2[2] < r2[1]);

    // accuracy 1.0 with n = 200 sits at 1 - 1/400 on the probit axis
    let clamp = dir.path().join("clamp.csv");
    std::fs::write(&clamp, "model_id,acc_id,acc_ood,n_id,n_ood\na,0.5,0.5,200,200\nb,1.0,0.8,200,200\n").unwrap();
    let out = dir.path().join("clamp.json");
    assert!(shiftline(&["analyze", "--records", path(&clamp), "--transform", "probit", "--out", path(&out)]).status.success());
    let f = fit(&out);
    let top = probit(1.0 - 1.0 / 400.0).unwrap();
    assert!((f.slope - probit(0.8).unwrap() / top).abs() < 1e-12);
    assert!(f.intercept.abs() < 1e-12);
}

#[test]
fn interpolate_traces_the_mixture() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("trace.csv");
    let args = ["interpolate", "--acc-id", "0.9", "--acc-ood", "0.8", "--classes", "10", "--steps", "3", "--out"];
    let o = shiftline(&[&args[..], &[path(&out)]].concat());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows: Vec<(f64, f64)> = read_results_file(&out)
        .unwrap()
        .into_iter()
        .map(|r| match r {
            ResultRow::Scored(r) => (r.metric_id.value.get(), r.metric_ood.value.get()),
            ResultRow::Skipped(_) => panic!("unexpected skipped row"),
        })
        .collect();
    assert_eq!(rows.len(), 3);
    assert!((rows[0].0 - 0.1).abs() < 1e-15 && (rows[0].1 - 0.1).abs() < 1e-15);
    assert!((rows[1].0 - 0.5).abs() < 1e-15 && (rows[1].1 - 0.45).abs() < 1e-15);
    assert_eq!(rows[2], (0.9, 0.8));

    let two = dir.path().join("two.csv");
    let o = shiftline(&["interpolate", "--acc-id", "0.7", "--acc-ood", "0.6", "--classes", "4", "--steps", "2", "--out", path(&two)]);
    assert!(o.status.success());
    assert_eq!(read_results_file(&two).unwrap().len(), 2);

    // the trace is a line in linear coordinates
    let long = dir.path().join("long.csv");
    assert!(shiftline(&["interpolate", "--acc-id", "0.95", "--acc-ood", "0.7", "--classes", "10", "--steps", "11", "--out", path(&long)]).status.success());
    let json = dir.path().join("fit.json");
    assert!(shiftline(&["analyze", "--records", path(&long), "--transform", "linear", "--out", path(&json)]).status.success());
    assert!((fit(&json).r_squared - 1.0).abs() < 1e-12);
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    std::fs::write(&config, "kind = \"main_trend\"\n[task]\nsigma = 0.1\n").unwrap();
    let o = shiftline(&["simulate", "--config", path(&config), "--out", path(&dir.path().join("o"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("`d`"));

    let o = shiftline(&["simulate", "--config", path(&dir.path().join("missing.toml")), "--out", "o"]);
    assert_eq!(o.status.code(), Some(2));

    let csv = dir.path().join("bad.csv");
    std::fs::write(&csv, "model_id,acc_id,acc_ood\na,0.5,0.4\nb,0.6,oops\n").unwrap();
    let o = shiftline(&["analyze", "--records", path(&csv), "--transform", "probit", "--out", path(&dir.path().join("f.json"))]);
    assert_eq!(o.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&o.stderr);
    assert!(msg.contains("row 2") && msg.contains("acc_ood"), "{msg}");

    let o = shiftline(&["interpolate", "--acc-id", "1.5", "--acc-ood", "0.5", "--classes", "10", "--steps", "3", "--out", path(&dir.path().join("t.csv"))]);
    assert_eq!(o.status.code(), Some(2));
    let o = shiftline(&["analyze", "--records", path(&csv), "--transform", "cubic", "--out", "f.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let out = blocker.join("trace.csv");
    let o = shiftline(&["interpolate", "--acc-id", "0.9", "--acc-ood", "0.8", "--classes", "10", "--steps", "3", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(3));
}
