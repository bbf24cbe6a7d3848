//! Merging per-scenario reports into one summary table, percentages with
//! two decimals.

use std::path::Path;

use crate::error::{Error, Result};
use crate::experiment::ExperimentReport;
use crate::metrics::MetricsReport;

fn pct(v: f64) -> String {
    format!("{:.2}", v * 100.0)
}

/// Render the merged summary: one reduced and one entire row per
/// experiment.
pub fn format_summary(reports: &[ExperimentReport]) -> Result<String> {
    if reports.is_empty() {
        return Err(Error::Report("no reports to merge".into()));
    }
    let header = [
        "Exp.", "Model", "Alg.", "N", "ACC(%)", "BACC(%)", "Prec.(%)", "Sens.(%)", "Spec.(%)",
        "F1(%)",
    ];
    let mut rows: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
    for report in reports {
        for (i, row) in report.rows.iter().enumerate() {
            let m: &MetricsReport = &row.metrics;
            rows.push(vec![
                if i == 0 { report.experiment.clone() } else { String::new() },
                capitalize(&row.model),
                row.algorithm.clone(),
                row.n.to_string(),
                pct(m.acc),
                pct(m.bacc),
                pct(m.precision),
                pct(m.sensitivity),
                pct(m.specificity),
                pct(m.f1),
            ]);
        }
    }

    let widths: Vec<usize> = (0..header.len())
        .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (i, row) in rows.iter().enumerate() {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, w)| format!("{cell:<w$}"))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
        if i == 0 {
            let total: usize = widths.iter().sum::<usize>() + 2 * (widths.len() - 1);
            out.push_str(&"-".repeat(total));
            out.push('\n');
        }
    }
    Ok(out)
}

fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().collect::<String>() + chars.as_str(),
        None => String::new(),
    }
}

/// Load report files and merge them into the summary table. When `out` is
/// given the summary is also written there.
pub fn merge_reports(paths: &[std::path::PathBuf], out: Option<&Path>) -> Result<String> {
    let reports: Result<Vec<ExperimentReport>> =
        paths.iter().map(|p| ExperimentReport::load(p)).collect();
    let summary = format_summary(&reports?)?;
    if let Some(path) = out {
        crate::experiment::write_atomic(path, summary.as_bytes())?;
    }
    Ok(summary)
}
