//! Markdown and CSV renderings of a [`BenchReport`].
//!
//! Accuracy and seconds are printed with two decimals. The CSV form adds an
//! `accuracy_raw` column at full precision.

use std::collections::BTreeSet;

use spca_core::spca::Method;

use crate::pipeline::{BenchReport, ReportRow};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Markdown,
    Csv,
}

const COLUMNS: [&str; 7] = [
    "Method",
    "d",
    "Classifier",
    "Accuracy",
    "Seconds",
    "GradEvals",
    "Iters",
];

fn cells(r: &ReportRow) -> Vec<String> {
    vec![
        r.reduction.name().to_string(),
        r.d.to_string(),
        r.classifier.name().to_string(),
        format!("{:.2}", r.accuracy),
        format!("{:.2}", r.spca_seconds),
        r.gradient_evals.to_string(),
        r.iterations.to_string(),
    ]
}

pub fn emit_table(report: &BenchReport, format: Format) -> Result<String, Error> {
    if report.is_empty() {
        return Err(Error::Usage("cannot render an empty report".into()));
    }
    let header: Vec<String> = COLUMNS.iter().map(|s| s.to_string()).collect();
    let body: Vec<Vec<String>> = report.rows.iter().map(cells).collect();
    match format {
        Format::Markdown => Ok(markdown(&header, &body)),
        Format::Csv => {
            let mut header = header;
            header.push("accuracy_raw".into());
            let body: Vec<Vec<String>> = report
                .rows
                .iter()
                .zip(body)
                .map(|(r, mut c)| {
                    c.push(r.accuracy.to_string());
                    c
                })
                .collect();
            csv_text(&header, &body)
        }
    }
}

/// Fit timings of the sparse methods, one row per `(method, d)`.
pub fn emit_timing_table(report: &BenchReport, format: Format) -> Result<String, Error> {
    let mut seen = BTreeSet::new();
    let body: Vec<Vec<String>> = report
        .rows
        .iter()
        .filter(|r| r.reduction != Method::PcaBaseline)
        .filter(|r| seen.insert((r.reduction, r.d)))
        .map(|r| {
            vec![
                r.reduction.name().to_string(),
                r.d.to_string(),
                format!("{:.2}", r.spca_seconds),
                r.gradient_evals.to_string(),
                r.iterations.to_string(),
            ]
        })
        .collect();
    if body.is_empty() {
        return Err(Error::Usage("report has no sparse PCA rows to time".into()));
    }
    let header: Vec<String> = ["Method", "d", "Seconds", "GradEvals", "Iters"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    match format {
        Format::Markdown => Ok(markdown(&header, &body)),
        Format::Csv => csv_text(&header, &body),
    }
}

fn markdown(header: &[String], body: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in body {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        format!("| {} |\n", padded.join(" | "))
    };
    let mut out = line(header);
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    out.push_str(&format!("|-{}-|\n", rule.join("-|-")));
    for row in body {
        out.push_str(&line(row));
    }
    out
}

fn csv_text(header: &[String], body: &[Vec<String>]) -> Result<String, Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let to_err = |e: csv::Error| Error::Usage(format!("csv encoding: {e}"));
    w.write_record(header).map_err(to_err)?;
    for row in body {
        w.write_record(row).map_err(to_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Usage(format!("csv encoding: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
