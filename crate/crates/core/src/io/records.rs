//! `records.csv`: one row per evaluated (or skipped) model.
//!
//! Probabilities are written in the shortest decimal form that parses back
//! to the same `f64`, so fits recomputed from the file match the run that
//! wrote it exactly.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::scenarios::SkippedModel;
use crate::stats::{clopper_pearson, parse_hyperparams, EvalRecord, MetricEstimate};

pub const SCHEMA_LINE: &str = "# shiftline-results v1";

pub const COLUMNS: [&str; 12] = [
    "model_id",
    "family",
    "hyperparams",
    "acc_id",
    "acc_id_ci_lo",
    "acc_id_ci_hi",
    "acc_ood",
    "acc_ood_ci_lo",
    "acc_ood_ci_hi",
    "n_id",
    "n_ood",
    "status",
];

pub const STATUS_OK: &str = "ok";

/// Confidence level for intervals rebuilt from `n` on ingest.
pub const INGEST_CONFIDENCE: f64 = 0.95;

/// A row of a results file: either a scored model or a skipped one.
#[derive(Debug, Clone, PartialEq)]
pub enum ResultRow {
    Scored(EvalRecord),
    Skipped(SkippedModel),
}

impl ResultRow {
    pub fn model_id(&self) -> &str {
        match self {
            ResultRow::Scored(r) => &r.model_id,
            ResultRow::Skipped(s) => &s.model_id,
        }
    }
}

fn metric_fields(m: &MetricEstimate) -> [String; 3] {
    [m.value.get(), m.ci_lo.get(), m.ci_hi.get()].map(|v| v.to_string())
}

fn hyperparam_string(map: &std::collections::BTreeMap<String, String>) -> String {
    map.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
}

/// Serialize rows, sorted by `model_id`, behind the schema comment line.
pub fn write_results<W: Write>(out: W, rows: &[ResultRow]) -> Result<()> {
    let mut sorted: Vec<&ResultRow> = rows.iter().collect();
    sorted.sort_by(|a, b| a.model_id().cmp(b.model_id()));
    let mut out = out;
    writeln!(out, "{SCHEMA_LINE}").map_err(|e| Error::io("<stream>", e))?;
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(COLUMNS).map_err(csv_error)?;
    for row in sorted {
        let fields: Vec<String> = match row {
            ResultRow::Scored(r) => {
                let [id, id_lo, id_hi] = metric_fields(&r.metric_id);
                let [ood, ood_lo, ood_hi] = metric_fields(&r.metric_ood);
                let n = |m: &MetricEstimate| m.n.map_or_else(String::new, |n| n.to_string());
                vec![
                    r.model_id.clone(),
                    r.family.clone(),
                    r.hyperparam_string(),
                    id,
                    id_lo,
                    id_hi,
                    ood,
                    ood_lo,
                    ood_hi,
                    n(&r.metric_id),
                    n(&r.metric_ood),
                    STATUS_OK.to_string(),
                ]
            }
            ResultRow::Skipped(s) => {
                let mut v = vec![s.model_id.clone(), s.family.clone(), hyperparam_string(&s.hyperparams)];
                v.extend(std::iter::repeat_n(String::new(), 8));
                v.push(format!("skipped: {}", s.reason));
                v
            }
        };
        w.write_record(&fields).map_err(csv_error)?;
    }
    w.flush().map_err(|e| csv_error(e.into()))?;
    Ok(())
}

pub fn write_results_file(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut buf = std::io::BufWriter::new(file);
    write_results(&mut buf, rows).map_err(|e| with_path(e, path))?;
    buf.flush().map_err(|e| Error::io(path, e))
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io("<stream>", io),
        other => Error::Schema {
            row: 0,
            column: String::new(),
            message: format!("{other:?}"),
        },
    }
}

fn with_path(e: Error, path: &Path) -> Error {
    match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    }
}

/// Parse a results file.
///
/// A leading `#` line, if present, must be the v1 schema line. Only
/// `acc_id` and `acc_ood` are required; the other known columns may be
/// absent, and unknown columns are rejected. Missing intervals are rebuilt
/// from `n` with a 95% Clopper-Pearson interval, or left exact without `n`.
/// Row numbers in errors count data rows from 1.
pub fn read_results<R: Read>(input: R) -> Result<Vec<ResultRow>> {
    let mut reader = BufReader::new(input);
    let mut first = String::new();
    reader
        .read_line(&mut first)
        .map_err(|e| Error::io("<stream>", e))?;
    let rest: Box<dyn Read> = if first.starts_with('#') {
        if first.trim_end() != SCHEMA_LINE {
            return Err(Error::Schema {
                row: 0,
                column: String::new(),
                message: format!("unsupported schema line `{}`", first.trim_end()),
            });
        }
        Box::new(reader)
    } else {
        Box::new(std::io::Cursor::new(first.into_bytes()).chain(reader))
    };

    let mut csv_reader = csv::ReaderBuilder::new().has_headers(true).from_reader(rest);
    let headers = csv_reader.headers().map_err(csv_error)?.clone();
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, h) in headers.iter().enumerate() {
        let name = COLUMNS.iter().find(|c| **c == h.trim()).ok_or_else(|| Error::Schema {
            row: 0,
            column: h.to_string(),
            message: "unknown column".into(),
        })?;
        if index.insert(name, i).is_some() {
            return Err(Error::Schema {
                row: 0,
                column: h.to_string(),
                message: "duplicate column".into(),
            });
        }
    }
    for required in ["acc_id", "acc_ood"] {
        if !index.contains_key(required) {
            return Err(Error::Schema {
                row: 0,
                column: required.into(),
                message: "required column missing".into(),
            });
        }
    }

    let mut rows = Vec::new();
    for (i, record) in csv_reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| Error::Schema {
            row,
            column: String::new(),
            message: e.to_string(),
        })?;
        let get = |col: &str| -> &str { index.get(col).and_then(|&j| record.get(j)).unwrap_or("").trim() };
        let model_id = match get("model_id") {
            "" => format!("row-{row}"),
            id => id.to_string(),
        };
        let family = get("family").to_string();
        let hyperparams = parse_hyperparams(get("hyperparams")).map_err(|e| Error::Schema {
            row,
            column: "hyperparams".into(),
            message: e.to_string(),
        })?;
        let status = get("status");
        if !(status.is_empty() || status == STATUS_OK) {
            let reason = status.strip_prefix("skipped:").unwrap_or(status).trim().to_string();
            rows.push(ResultRow::Skipped(SkippedModel {
                model_id,
                family,
                hyperparams,
                reason,
            }));
            continue;
        }
        let metric_id = parse_metric(&get, row, "acc_id", "n_id")?;
        let metric_ood = parse_metric(&get, row, "acc_ood", "n_ood")?;
        let mut record = EvalRecord::new(model_id, family, metric_id, metric_ood);
        record.hyperparams = hyperparams;
        rows.push(ResultRow::Scored(record));
    }
    Ok(rows)
}

pub fn read_results_file(path: &Path) -> Result<Vec<ResultRow>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_results(file).map_err(|e| with_path(e, path))
}

fn parse_metric<'a>(get: &impl Fn(&str) -> &'a str, row: usize, value_col: &str, n_col: &str) -> Result<MetricEstimate> {
    let schema = |column: &str, message: String| Error::Schema {
        row,
        column: column.to_string(),
        message,
    };
    let number = |column: &str| -> Result<Option<f64>> {
        match get(column) {
            "" => Ok(None),
            s => s
                .parse::<f64>()
                .ok()
                .filter(|v| (0.0..=1.0).contains(v))
                .map(Some)
                .ok_or_else(|| schema(column, format!("`{s}` is not a probability"))),
        }
    };
    let value = number(value_col)?.ok_or_else(|| schema(value_col, "value missing".into()))?;
    let n = match get(n_col) {
        "" => None,
        s => Some(
            s.parse::<u64>()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| schema(n_col, format!("`{s}` is not a positive count")))?,
        ),
    };
    let lo_col = format!("{value_col}_ci_lo");
    let hi_col = format!("{value_col}_ci_hi");
    let (lo, hi) = match (number(&lo_col)?, number(&hi_col)?) {
        (Some(lo), Some(hi)) => (lo, hi),
        (None, None) => match n {
            Some(n) => {
                let successes = (value * n as f64).round() as u64;
                let (lo, hi) = clopper_pearson(successes, n, INGEST_CONFIDENCE).map_err(|e| schema(n_col, e.to_string()))?;
                (lo.min(value), hi.max(value))
            }
            None => (value, value),
        },
        (Some(_), None) => return Err(schema(&hi_col, "upper bound missing".into())),
        (None, Some(_)) => return Err(schema(&lo_col, "lower bound missing".into())),
    };
    MetricEstimate::with_interval(value, n, lo, hi).map_err(|e| schema(value_col, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_rows() -> Vec<ResultRow> {
        let exact = EvalRecord::new(
            "b",
            "ridge",
            MetricEstimate::exact(0.999999999871).unwrap(),
            MetricEstimate::exact(0.1 + 0.2).unwrap(),
        )
        .with_param("alpha", "1e-3");
        let sampled = EvalRecord::new(
            "a,with comma",
            "knn",
            MetricEstimate::from_counts(731, 1000, 0.95).unwrap(),
            MetricEstimate::from_counts(0, 1000, 0.95).unwrap(),
        )
        .with_param("k", 3);
        let skipped = SkippedModel {
            model_id: "c".into(),
            family: "logistic_l1".into(),
            hyperparams: [("C".to_string(), "1e-2".to_string())].into(),
            reason: "classifier weight vector is identically zero".into(),
        };
        vec![
            ResultRow::Scored(exact),
            ResultRow::Skipped(skipped),
            ResultRow::Scored(sampled),
        ]
    }

    #[test]
    fn round_trip_is_exact_and_sorted() {
        let rows = sample_rows();
        let mut buf = Vec::new();
        write_results(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# shiftline-results v1\nmodel_id,family,hyperparams,acc_id,"));
        let back = read_results(buf.as_slice()).unwrap();
        let ids: Vec<&str> = back.iter().map(ResultRow::model_id).collect();
        assert_eq!(ids, ["a,with comma", "b", "c"]);
        let mut expected = rows.clone();
        expected.sort_by(|a, b| a.model_id().cmp(b.model_id()));
        assert_eq!(back, expected);
    }

    #[test]
    fn minimal_external_file() {
        let text = "acc_id,acc_ood,n_id\n0.5,0.4,100\n1.0,0.9,\n";
        let rows = read_results(text.as_bytes()).unwrap();
        let ResultRow::Scored(first) = &rows[0] else { panic!() };
        assert_eq!(first.model_id, "row-1");
        let (lo, hi) = clopper_pearson(50, 100, 0.95).unwrap();
        assert_eq!((first.metric_id.ci_lo.get(), first.metric_id.ci_hi.get()), (lo, hi));
        assert!(first.metric_ood.is_exact());
        let ResultRow::Scored(second) = &rows[1] else { panic!() };
        assert!(second.is_exact());
    }

    #[test]
    fn schema_errors_name_row_and_column() {
        let err = read_results("acc_id,acc_ood\n0.5,0.4\n0.5,1.4\n".as_bytes()).unwrap_err();
        match err {
            Error::Schema { row, column, .. } => assert_eq!((row, column.as_str()), (2, "acc_ood")),
            other => panic!("{other:?}"),
        }
        let err = read_results("acc_id,accuracy\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Schema { column, .. } if column == "accuracy"));
        let err = read_results("acc_id\n0.5\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Schema { column, .. } if column == "acc_ood"));
        let err = read_results("# shiftline-results v9\nacc_id,acc_ood\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Schema { row: 0, .. }));
    }
}
