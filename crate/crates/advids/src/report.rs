//! Report files: `report.json`, an aligned `report.txt` table and one
//! `plot_<name>.csv` (epsilon, accuracy) per experiment.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use advids_core::experiment::{EvalRow, ExperimentReport};
use serde::{Deserialize, Serialize};

use crate::error::{AppError, Result};

pub const REPORT_JSON: &str = "report.json";
pub const REPORT_TXT: &str = "report.txt";

#[derive(Debug, Serialize, Deserialize)]
pub struct ReportFile {
    pub experiments: Vec<ExperimentReport>,
}

pub fn report_json(reports: &[ExperimentReport]) -> String {
    let file = ReportFile {
        experiments: reports.to_vec(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("report serialization is infallible");
    s.push('\n');
    s
}

pub fn read_report_json(path: &Path) -> Result<ReportFile> {
    let text = fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| AppError::Json {
        path: path.to_path_buf(),
        source,
    })
}

const HEADER: [&str; 8] = [
    "TP",
    "TN",
    "FP",
    "FN",
    "Precision",
    "Recall",
    "F1",
    "Accuracy",
];

fn cells(row: &EvalRow) -> [String; 8] {
    let c = &row.confusion;
    let s = &row.scores;
    [
        c.tp.to_string(),
        c.tn.to_string(),
        c.fp.to_string(),
        c.fn_.to_string(),
        format!("{:.2}", s.precision),
        format!("{:.2}", s.recall),
        format!("{:.2}", s.f1),
        format!("{:.2}", s.accuracy),
    ]
}

fn render_rows(out: &mut String, rows: &[&EvalRow]) {
    let body: Vec<(String, [String; 8])> =
        rows.iter().map(|r| (r.label.clone(), cells(r))).collect();
    let label_w = body.iter().map(|(l, _)| l.len()).max().unwrap_or(0).max(5);
    let mut widths = HEADER.map(str::len);
    for (_, c) in &body {
        for (w, cell) in widths.iter_mut().zip(c) {
            *w = (*w).max(cell.len());
        }
    }
    let _ = write!(out, "{:<label_w$}", "row");
    for (h, w) in HEADER.iter().zip(widths) {
        let _ = write!(out, "  {h:>w$}");
    }
    out.push('\n');
    for (label, c) in &body {
        let _ = write!(out, "{label:<label_w$}");
        for (cell, w) in c.iter().zip(widths) {
            let _ = write!(out, "  {cell:>w$}");
        }
        out.push('\n');
    }
}

/// Plain-text tables, one block per experiment. Scores are percentages.
pub fn report_table(reports: &[ExperimentReport]) -> String {
    let mut out = String::new();
    for (i, r) in reports.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let p = &r.provenance;
        let _ = writeln!(
            out,
            "== {} (seed {}, train {}/{}, test {}/{} normal/attack) ==",
            r.name,
            p.seed,
            p.train_counts[0],
            p.train_counts[1],
            p.test_counts[0],
            p.test_counts[1]
        );
        let rows: Vec<&EvalRow> = r.table_rows().collect();
        render_rows(&mut out, &rows);
        if let Some(d) = &r.defense {
            let _ = writeln!(
                out,
                "-- adversarial training, test set at epsilon={} --",
                d.attack_epsilon
            );
            let mut rows = vec![&d.undefended];
            rows.extend(d.rows.iter().map(|row| &row.eval));
            render_rows(&mut out, &rows);
        }
    }
    out
}

/// `epsilon,accuracy` for the sweep rows of one experiment.
pub fn plot_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("epsilon,accuracy\n");
    for row in &report.sweep {
        if let Some(e) = row.epsilon {
            let _ = writeln!(out, "{e},{}", row.scores.accuracy);
        }
    }
    out
}

pub fn loss_csv(trace: &[f64]) -> String {
    let mut out = String::from("epoch,loss\n");
    for (i, l) in trace.iter().enumerate() {
        let _ = writeln!(out, "{},{l}", i + 1);
    }
    out
}

pub fn plot_file_name(report: &ExperimentReport) -> String {
    format!("plot_{}.csv", report.name)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| AppError::io(path, e))
}

/// Writes every report file into `dir` and returns their paths.
pub fn write_reports(dir: &Path, reports: &[ExperimentReport]) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut put = |name: String, text: String| -> Result<()> {
        let path = dir.join(name);
        write_text(&path, &text)?;
        written.push(path);
        Ok(())
    };
    put(REPORT_JSON.into(), report_json(reports))?;
    put(REPORT_TXT.into(), report_table(reports))?;
    for r in reports {
        put(plot_file_name(r), plot_csv(r))?;
    }
    Ok(written)
}
