//! Scatter plots of OOD against ID accuracy as standalone SVG.
//!
//! Both axes share one range in the transformed domain so `y = x` is the
//! diagonal; tick labels are accuracies. Output depends only on the inputs
//! (fixed formatting, no timestamps), so identical inputs give identical
//! bytes.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::numerics::{apply_transform, continuity_clamp, TransformKind};
use crate::scenarios::GroupFit;
use crate::stats::{EvalRecord, MetricEstimate};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 640.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = WIDTH - 30.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = HEIGHT - 70.0;

const MARKER_COLORS: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];
const FIT_COLORS: [&str; 4] = ["#08306b", "#7f2704", "#00441b", "#3f007d"];

/// Smallest distance of a plotted probability from 0 or 1 when no sample
/// size is known.
const EDGE: f64 = 1e-12;

const PROBABILITY_TICKS: [f64; 25] = [
    0.0001, 0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.98, 0.99,
    0.995, 0.998, 0.999, 0.9995, 0.9999, 0.99999,
];
const LINEAR_TICKS: [f64; 11] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

fn to_axis(p: f64, n: Option<u64>, axis: TransformKind) -> f64 {
    if axis == TransformKind::Linear {
        return p;
    }
    let p = match n {
        Some(n) => continuity_clamp(p, n),
        None => p.clamp(EDGE, 1.0 - EDGE),
    };
    apply_transform(p, axis, None).expect("probability clamped inside (0, 1)")
}

fn metric_points(m: &MetricEstimate, axis: TransformKind) -> [f64; 3] {
    [m.value.get(), m.ci_lo.get(), m.ci_hi.get()].map(|p| to_axis(p, m.n, axis))
}

/// `y` on `axis` of the line `slope·x + intercept` drawn in `domain`.
fn line_on_axis(x: f64, slope: f64, intercept: f64, domain: TransformKind, axis: TransformKind) -> f64 {
    if domain == axis {
        return slope * x + intercept;
    }
    let p = axis.inverse(x).clamp(EDGE, 1.0 - EDGE);
    let xd = to_axis(p, None, domain);
    let q = domain.inverse(slope * xd + intercept);
    to_axis(q, None, axis)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

struct Frame {
    lo: f64,
    hi: f64,
}

impl Frame {
    fn px(&self, v: f64) -> f64 {
        LEFT + (v - self.lo) / (self.hi - self.lo) * (RIGHT - LEFT)
    }

    fn py(&self, v: f64) -> f64 {
        BOTTOM - (v - self.lo) / (self.hi - self.lo) * (BOTTOM - TOP)
    }
}

/// Render the plot. The theoretical line is given in the probit domain.
pub fn render_svg(
    records: &[EvalRecord],
    fits: &[GroupFit],
    theoretical_line: Option<(f64, f64)>,
    axis: TransformKind,
) -> Result<String> {
    if records.is_empty() {
        return Err(Error::domain("scatter plot needs at least one record"));
    }
    let points: Vec<([f64; 3], [f64; 3])> = records
        .iter()
        .map(|r| (metric_points(&r.metric_id, axis), metric_points(&r.metric_ood, axis)))
        .collect();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (id, ood) in &points {
        for v in id.iter().chain(ood) {
            lo = lo.min(*v);
            hi = hi.max(*v);
        }
    }
    let span = hi - lo;
    let pad = if span > 0.0 { 0.05 * span } else { 0.5 };
    let frame = Frame {
        lo: lo - pad,
        hi: hi + pad,
    };

    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(w, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        w,
        r#"<clipPath id="plot-area"><rect x="{LEFT}" y="{TOP}" width="{:.2}" height="{:.2}"/></clipPath>"#,
        RIGHT - LEFT,
        BOTTOM - TOP
    );
    let _ = writeln!(
        w,
        r##"<rect x="{LEFT}" y="{TOP}" width="{:.2}" height="{:.2}" fill="none" stroke="#333"/>"##,
        RIGHT - LEFT,
        BOTTOM - TOP
    );

    // Ticks, labelled in accuracy units.
    let candidates: &[f64] = if axis == TransformKind::Linear {
        &LINEAR_TICKS
    } else {
        &PROBABILITY_TICKS
    };
    let _ = writeln!(w, r#"<g class="ticks">"#);
    for &p in candidates {
        let v = to_axis(p, None, axis);
        if v < frame.lo || v > frame.hi {
            continue;
        }
        let (x, y) = (frame.px(v), frame.py(v));
        let _ = writeln!(
            w,
            r##"<line class="xtick" data-accuracy="{p}" x1="{x:.2}" y1="{BOTTOM}" x2="{x:.2}" y2="{:.2}" stroke="#333"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{p}</text>"##,
            BOTTOM + 5.0,
            BOTTOM + 18.0
        );
        let _ = writeln!(
            w,
            r##"<line class="ytick" data-accuracy="{p}" x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="#333"/><text x="{:.2}" y="{:.2}" text-anchor="end">{p}</text>"##,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(w, "</g>");
    let _ = writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">ID accuracy ({axis} scale)</text>"#,
        (LEFT + RIGHT) / 2.0,
        HEIGHT - 25.0
    );
    let _ = writeln!(
        w,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">OOD accuracy ({axis} scale)</text>"#,
        (TOP + BOTTOM) / 2.0,
        (TOP + BOTTOM) / 2.0
    );

    let _ = writeln!(w, r#"<g clip-path="url(#plot-area)">"#);
    let (a, b) = (frame.lo, frame.hi);
    let _ = writeln!(
        w,
        r##"<line class="identity" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#888" stroke-dasharray="6 4"/>"##,
        frame.px(a),
        frame.py(a),
        frame.px(b),
        frame.py(b)
    );
    let mut legend: Vec<(String, String, &str)> = Vec::new();
    let mut polyline = |class: &str, slope: f64, intercept: f64, domain: TransformKind, style: &str| {
        let steps = if domain == axis { 1 } else { 120 };
        let limit = 4.0 * (b - a);
        let pts: Vec<String> = (0..=steps)
            .map(|i| {
                let x = a + (b - a) * i as f64 / steps as f64;
                let y = line_on_axis(x, slope, intercept, domain, axis).clamp(a - limit, b + limit);
                format!("{:.2},{:.2}", frame.px(x), frame.py(y))
            })
            .collect();
        let _ = writeln!(w, r#"<polyline class="{class}" points="{}" fill="none" {style}/>"#, pts.join(" "));
    };
    if let Some((slope, intercept)) = theoretical_line {
        let style = r##"stroke="#000" stroke-width="1.5" stroke-dasharray="8 3 2 3""##;
        polyline("theory", slope, intercept, TransformKind::Probit, style);
        legend.push(("theoretical".into(), "#000".into(), "8 3 2 3"));
    }
    for (i, g) in fits.iter().enumerate() {
        let color = FIT_COLORS[i % FIT_COLORS.len()];
        let style = format!(r#"stroke="{color}" stroke-width="1.5""#);
        polyline("fit", g.fit.slope, g.fit.intercept, g.fit.transform, &style);
        legend.push((format!("fit: {}", g.group), color.into(), ""));
    }

    let families: Vec<&str> = records
        .iter()
        .map(|r| r.family.as_str())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let color_of = |family: &str| {
        let i = families.iter().position(|f| *f == family).unwrap_or(0);
        MARKER_COLORS[i % MARKER_COLORS.len()]
    };
    for (r, (id, ood)) in records.iter().zip(&points) {
        let color = color_of(&r.family);
        let (x, y) = (frame.px(id[0]), frame.py(ood[0]));
        let _ = writeln!(
            w,
            r#"<g class="record" data-model="{}"><line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{color}"/><line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="{color}"/><circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="{color}"/></g>"#,
            escape(&r.model_id),
            frame.px(id[1]),
            frame.px(id[2]),
            frame.py(ood[1]),
            frame.py(ood[2]),
        );
    }
    let _ = writeln!(w, "</g>");

    let _ = writeln!(w, r#"<g class="legend">"#);
    let mut row = 0.0;
    for family in &families {
        let y = TOP + 15.0 + 15.0 * row;
        let _ = writeln!(
            w,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{}"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            LEFT + 12.0,
            y - 4.0,
            color_of(family),
            LEFT + 20.0,
            y,
            escape(family)
        );
        row += 1.0;
    }
    for (label, color, dash) in &legend {
        let y = TOP + 15.0 + 15.0 * row;
        let dash = if dash.is_empty() {
            String::new()
        } else {
            format!(r#" stroke-dasharray="{dash}""#)
        };
        let _ = writeln!(
            w,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="1.5"{dash}/><text x="{:.2}" y="{:.2}">{}</text>"#,
            LEFT + 6.0,
            y - 4.0,
            LEFT + 18.0,
            y - 4.0,
            LEFT + 20.0,
            y,
            escape(label)
        );
        row += 1.0;
    }
    let _ = writeln!(w, "</g>");
    let _ = writeln!(w, "</svg>");
    Ok(s)
}

pub fn emit_svg(
    records: &[EvalRecord],
    fits: &[GroupFit],
    theoretical_line: Option<(f64, f64)>,
    axis: TransformKind,
    path: &Path,
) -> Result<()> {
    let text = render_svg(records, fits, theoretical_line, axis)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::fit_trend;

    fn record(id: &str, family: &str, a: f64, b: f64, n: Option<u64>) -> EvalRecord {
        let m = |v: f64| match n {
            Some(n) => MetricEstimate::from_counts((v * n as f64).round() as u64, n, 0.95).unwrap(),
            None => MetricEstimate::exact(v).unwrap(),
        };
        EvalRecord::new(id, family, m(a), m(b))
    }

    fn attr(tag: &str, name: &str) -> f64 {
        let start = tag.find(&format!(" {name}=\"")).unwrap() + name.len() + 3;
        let end = start + tag[start..].find('"').unwrap();
        tag[start..end].parse().unwrap()
    }

    #[test]
    fn single_record_gives_one_marker() {
        let svg = render_svg(&[record("m", "knn", 0.8, 0.7, Some(1000))], &[], None, TransformKind::Probit).unwrap();
        assert!(svg.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<circle cx").count(), 2); // marker and its legend swatch
        assert_eq!(svg.matches("class=\"record\"").count(), 1);
        assert!(svg.contains("class=\"identity\"") && svg.contains("stroke-dasharray=\"6 4\""));
    }

    #[test]
    fn half_tick_sits_at_probit_zero() {
        let records = [
            record("a", "ridge", 0.3, 0.25, None),
            record("b", "ridge", 0.7, 0.6, None),
        ];
        let svg = render_svg(&records, &[], None, TransformKind::Probit).unwrap();
        let tick = svg
            .lines()
            .find(|l| l.contains("class=\"xtick\" data-accuracy=\"0.5\""))
            .unwrap();
        // Both axes span the same interval, symmetric about 0 here up to the data.
        let lo = crate::numerics::probit(0.25).unwrap();
        let hi = crate::numerics::probit(0.7).unwrap();
        let pad = 0.05 * (hi - lo);
        let expected = LEFT + (0.0 - (lo - pad)) / (hi - lo + 2.0 * pad) * (RIGHT - LEFT);
        assert!((attr(tick, "x1") - expected).abs() < 0.01);
    }

    #[test]
    fn lines_and_whiskers_present() {
        let records: Vec<_> = (1..=5)
            .map(|i| record(&format!("m{i}"), "logistic_l2", 0.5 + 0.08 * i as f64, 0.45 + 0.07 * i as f64, Some(500)))
            .collect();
        let fit = fit_trend(&records, TransformKind::Probit).unwrap();
        let fits = [GroupFit {
            group: "all".into(),
            fit,
        }];
        for axis in TransformKind::ALL {
            let svg = render_svg(&records, &fits, Some((0.7, 0.0)), axis).unwrap();
            assert_eq!(svg.matches("class=\"fit\"").count(), 1);
            assert_eq!(svg.matches("class=\"theory\"").count(), 1);
            // each record: two whiskers and a marker
            for line in svg.lines().filter(|l| l.contains("class=\"record\"")) {
                assert_eq!(line.matches("<line").count(), 2);
                assert_eq!(line.matches("<circle").count(), 1);
            }
            assert_eq!(svg, render_svg(&records, &fits, Some((0.7, 0.0)), axis).unwrap());
        }
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(render_svg(&[], &[], None, TransformKind::Linear).is_err());
    }
}
