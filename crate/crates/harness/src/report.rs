//! Result files: detail CSV, summary CSV, plotting script and SVG chart.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use tabkit_core::evaluate::{Method, ReplicateSummary, ResultRecord};

use crate::config::Metric;
use crate::HarnessError;

pub const DETAIL_HEADER: [&str; 19] = [
    "scenario",
    "kind_param_name",
    "kind_param_value",
    "gamma",
    "method",
    "replicate",
    "seed",
    "n_q",
    "n_p",
    "k_q",
    "k_p",
    "tau",
    "lambda_q",
    "lambda_p",
    "d",
    "s",
    "accuracy",
    "bayes_agreement",
    "excess_risk",
];

pub const SUMMARY_HEADER: [&str; 15] = [
    "scenario",
    "kind_param_name",
    "kind_param_value",
    "gamma",
    "method",
    "count",
    "accuracy_mean",
    "accuracy_sd",
    "accuracy_se",
    "bayes_agreement_mean",
    "bayes_agreement_sd",
    "bayes_agreement_se",
    "excess_risk_mean",
    "excess_risk_sd",
    "excess_risk_se",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn detail_row(r: &ResultRecord) -> Vec<String> {
    vec![
        r.scenario.to_string(),
        r.param_name.to_string(),
        r.param_value.to_string(),
        opt(r.gamma),
        r.method.name().to_string(),
        r.replicate.to_string(),
        r.seed.to_string(),
        r.n_q.to_string(),
        r.n_p.to_string(),
        opt(r.k_q),
        opt(r.k_p),
        opt(r.tau),
        opt(r.lambda_q),
        opt(r.lambda_p),
        r.d.to_string(),
        opt(r.s),
        r.accuracy.to_string(),
        r.bayes_agreement.to_string(),
        r.excess_risk.to_string(),
    ]
}

pub fn summary_row(s: &ReplicateSummary) -> Vec<String> {
    let mut row = vec![
        s.scenario.to_string(),
        s.param_name.to_string(),
        s.param_value.to_string(),
        opt(s.gamma),
        s.method.name().to_string(),
        s.count.to_string(),
    ];
    for m in [s.accuracy, s.bayes_agreement, s.excess_risk] {
        row.extend([m.mean.to_string(), m.sd.to_string(), m.se.to_string()]);
    }
    row
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Io(format!("{}: {e}", path.display()))
}

fn write_csv(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<(), HarnessError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(header).map_err(|e| io_err(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

pub fn write_detail_csv(path: &Path, records: &[ResultRecord]) -> Result<(), HarnessError> {
    write_csv(path, &DETAIL_HEADER, records.iter().map(detail_row))
}

pub fn write_summary_csv(path: &Path, summary: &[ReplicateSummary]) -> Result<(), HarnessError> {
    write_csv(path, &SUMMARY_HEADER, summary.iter().map(summary_row))
}

/// `dir/stem<suffix>` next to `csv`.
pub fn sibling(csv: &Path, suffix: &str) -> PathBuf {
    let stem = csv.file_stem().and_then(|s| s.to_str()).unwrap_or("results");
    csv.with_file_name(format!("{stem}{suffix}"))
}

/// Paths of every file produced for one detail CSV.
pub struct OutputPaths {
    pub detail: PathBuf,
    pub summary: PathBuf,
    pub script: PathBuf,
    pub svg: PathBuf,
}

impl OutputPaths {
    pub fn new(detail: &Path) -> Self {
        Self {
            detail: detail.to_path_buf(),
            summary: sibling(detail, "_summary.csv"),
            script: sibling(detail, "_plot.py"),
            svg: sibling(detail, ".svg"),
        }
    }
}

fn metric_column(metric: Metric) -> &'static str {
    match metric {
        Metric::Accuracy => "accuracy_mean",
        Metric::Agreement => "bayes_agreement_mean",
    }
}

pub fn plot_script(summary_csv: &Path, metric: Metric) -> String {
    let file = summary_csv.file_name().and_then(|s| s.to_str()).unwrap_or("summary.csv");
    let col = metric_column(metric);
    format!(
        r#"import csv
import os
from collections import defaultdict

import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
rows = list(csv.DictReader(open(os.path.join(here, "{file}"))))
panels = defaultdict(lambda: defaultdict(list))
for r in rows:
    panels[r["gamma"]][r["method"]].append((float(r["kind_param_value"]), float(r["{col}"])))

fig, axes = plt.subplots(1, len(panels), figsize=(5 * len(panels), 4), squeeze=False)
for ax, (gamma, lines) in zip(axes[0], sorted(panels.items())):
    for method, pts in lines.items():
        pts.sort()
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", linestyle="--", label=method)
    ax.set_xlabel(rows[0]["kind_param_name"])
    ax.set_ylabel("{col}")
    if gamma:
        ax.set_title("gamma = " + gamma)
    ax.grid(True)
    ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(here, "{stem}.png"), dpi=150)
"#,
        stem = file.trim_end_matches("_summary.csv"),
    )
}

const PALETTE: [&str; 9] = [
    "#d62728", "#2ca02c", "#1f77b4", "#8c564b", "#9467bd", "#ff7f0e", "#17becf", "#7f7f7f", "#bcbd22",
];

/// Line chart of the mean metric against the grid parameter: one panel per
/// gamma, one line per method.
pub fn render_svg(summary: &[ReplicateSummary], metric: Metric) -> String {
    let value = |s: &ReplicateSummary| match metric {
        Metric::Accuracy => s.accuracy.mean,
        Metric::Agreement => s.bayes_agreement.mean,
    };
    let mut gammas: Vec<Option<f64>> = Vec::new();
    let mut methods: Vec<Method> = Vec::new();
    for s in summary {
        if !gammas.contains(&s.gamma) {
            gammas.push(s.gamma);
        }
        if !methods.contains(&s.method) {
            methods.push(s.method);
        }
    }
    let (pw, ph, margin) = (360.0, 280.0, 50.0);
    let legend_w = 130.0;
    let width = gammas.len().max(1) as f64 * (pw + margin) + margin + legend_w;
    let height = ph + 2.0 * margin;
    let xs: Vec<f64> = summary.iter().map(|s| s.param_value).collect();
    let (xmin, xmax) = bounds(&xs);
    let ys: Vec<f64> = summary.iter().map(value).collect();
    let (ymin, ymax) = bounds(&ys);
    let (ymin, ymax) = ((ymin * 20.0).floor() / 20.0, (ymax * 20.0).ceil() / 20.0);
    let (ymin, ymax) = if ymax > ymin { (ymin, ymax) } else { (ymin - 0.05, ymax + 0.05) };
    let (xmin, xmax) = if xmax > xmin { (xmin, xmax) } else { (xmin - 0.5, xmax + 0.5) };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let param = summary.first().map(|s| s.param_name).unwrap_or("x");
    for (pi, gamma) in gammas.iter().enumerate() {
        let ox = margin + pi as f64 * (pw + margin);
        let oy = margin;
        let px = |x: f64| ox + (x - xmin) / (xmax - xmin) * pw;
        let py = |y: f64| oy + ph - (y - ymin) / (ymax - ymin) * ph;
        let _ = writeln!(
            svg,
            r#"<rect x="{ox}" y="{oy}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );
        for i in 0..=5 {
            let y = ymin + (ymax - ymin) * i as f64 / 5.0;
            let _ = writeln!(
                svg,
                r##"<line x1="{ox}" x2="{}" y1="{yy:.2}" y2="{yy:.2}" stroke="#ddd"/><text x="{}" y="{:.2}" text-anchor="end">{y:.2}</text>"##,
                ox + pw,
                ox - 4.0,
                py(y) + 4.0,
                yy = py(y)
            );
            let x = xmin + (xmax - xmin) * i as f64 / 5.0;
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{}" text-anchor="middle">{x:.2}</text>"#,
                px(x),
                oy + ph + 14.0
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle">{param}</text>"#,
            ox + pw / 2.0,
            oy + ph + 30.0
        );
        if let Some(g) = gamma {
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" text-anchor="middle">gamma = {g}</text>"#,
                ox + pw / 2.0,
                oy - 8.0
            );
        }
        for (mi, m) in methods.iter().enumerate() {
            let mut pts: Vec<(f64, f64)> = summary
                .iter()
                .filter(|s| s.gamma == *gamma && s.method == *m)
                .map(|s| (s.param_value, value(s)))
                .collect();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            let color = PALETTE[mi % PALETTE.len()];
            let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5" stroke-dasharray="5,3"/>"#,
                path.join(" ")
            );
            for &(x, y) in &pts {
                let _ = writeln!(
                    svg,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                    px(x),
                    py(y)
                );
            }
        }
    }
    let lx = width - legend_w;
    for (mi, m) in methods.iter().enumerate() {
        let y = margin + 16.0 * mi as f64;
        let color = PALETTE[mi % PALETTE.len()];
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" x2="{}" y1="{y}" y2="{y}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            lx + 18.0,
            lx + 22.0,
            y + 4.0,
            m.name()
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn bounds(v: &[f64]) -> (f64, f64) {
    if v.is_empty() {
        return (0.0, 1.0);
    }
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), HarnessError> {
    let mut f = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| io_err(path, e))
}
