//! Per-iteration metrics and tabular export.

use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::selfplay::artifacts::to_jsonl;

pub const REPORT_FILE: &str = "report.jsonl";

/// Bucket labels: `0`, `(0,1/8]`, `(1/8,1/4]`, `(1/4,1/2]`, `(1/2,1]`.
pub const BUCKETS: [&str; 5] = ["0", "(0,1/8]", "(1/8,1/4]", "(1/4,1/2]", "(1/2,1]"];

/// Bucket index of a pass rate given as `successes / attempts`. Exact in
/// integers, so boundary rates like 8/32 land on the closed side.
pub fn bucket(successes: usize, attempts: usize) -> usize {
    let (s, a) = (successes as u128, attempts as u128);
    if s == 0 {
        0
    } else if 8 * s <= a {
        1
    } else if 4 * s <= a {
        2
    } else if 2 * s <= a {
        3
    } else {
        4
    }
}

pub fn histogram<I: IntoIterator<Item = (usize, usize)>>(rates: I) -> [usize; 5] {
    let mut h = [0; 5];
    for (s, a) in rates {
        h[bucket(s, a)] += 1;
    }
    h
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IterationReport {
    pub method: String,
    pub iteration: usize,
    pub conjectures_generated: usize,
    pub conjectures_kept: usize,
    pub unproved_before: usize,
    pub targets: usize,
    pub proofs_sampled: u64,
    pub proofs_sampled_cumulative: u64,
    pub newly_proved: usize,
    pub proved_total: usize,
    pub dataset_size: usize,
    pub cumulative_pass_rate: f64,
    pub conjecture_histogram: [usize; 5],
    pub statement_histogram: [usize; 5],
    pub conjecturer_dataset_size: usize,
    pub prover_dataset_size: usize,
    pub replay_size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl IterationReport {
    /// Dataset statements proved over the whole run divided by the dataset size.
    pub fn pass_rate(proved: usize, dataset_size: usize) -> f64 {
        if dataset_size == 0 {
            0.0
        } else {
            proved as f64 / dataset_size as f64
        }
    }
}

/// Flat export row; the column order is the field order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub method: String,
    pub iteration: usize,
    pub conjectures_generated: usize,
    pub conjectures_kept: usize,
    pub unproved_before: usize,
    pub targets: usize,
    pub proofs_sampled: u64,
    pub proofs_sampled_cumulative: u64,
    pub newly_proved: usize,
    pub proved_total: usize,
    pub dataset_size: usize,
    pub cumulative_pass_rate: f64,
    pub conj_h0: usize,
    pub conj_h1: usize,
    pub conj_h2: usize,
    pub conj_h3: usize,
    pub conj_h4: usize,
    pub stmt_h0: usize,
    pub stmt_h1: usize,
    pub stmt_h2: usize,
    pub stmt_h3: usize,
    pub stmt_h4: usize,
    pub conjecturer_dataset_size: usize,
    pub prover_dataset_size: usize,
    pub replay_size: usize,
    pub elapsed_ms: Option<u64>,
}

pub const COLUMNS: [&str; 26] = [
    "method",
    "iteration",
    "conjectures_generated",
    "conjectures_kept",
    "unproved_before",
    "targets",
    "proofs_sampled",
    "proofs_sampled_cumulative",
    "newly_proved",
    "proved_total",
    "dataset_size",
    "cumulative_pass_rate",
    "conj_h0",
    "conj_h1",
    "conj_h2",
    "conj_h3",
    "conj_h4",
    "stmt_h0",
    "stmt_h1",
    "stmt_h2",
    "stmt_h3",
    "stmt_h4",
    "conjecturer_dataset_size",
    "prover_dataset_size",
    "replay_size",
    "elapsed_ms",
];

impl From<&IterationReport> for ReportRow {
    fn from(r: &IterationReport) -> Self {
        let [conj_h0, conj_h1, conj_h2, conj_h3, conj_h4] = r.conjecture_histogram;
        let [stmt_h0, stmt_h1, stmt_h2, stmt_h3, stmt_h4] = r.statement_histogram;
        ReportRow {
            method: r.method.clone(),
            iteration: r.iteration,
            conjectures_generated: r.conjectures_generated,
            conjectures_kept: r.conjectures_kept,
            unproved_before: r.unproved_before,
            targets: r.targets,
            proofs_sampled: r.proofs_sampled,
            proofs_sampled_cumulative: r.proofs_sampled_cumulative,
            newly_proved: r.newly_proved,
            proved_total: r.proved_total,
            dataset_size: r.dataset_size,
            cumulative_pass_rate: r.cumulative_pass_rate,
            conj_h0,
            conj_h1,
            conj_h2,
            conj_h3,
            conj_h4,
            stmt_h0,
            stmt_h1,
            stmt_h2,
            stmt_h3,
            stmt_h4,
            conjecturer_dataset_size: r.conjecturer_dataset_size,
            prover_dataset_size: r.prover_dataset_size,
            replay_size: r.replay_size,
            elapsed_ms: r.elapsed_ms,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("{0} holds no run report")]
    MissingRun(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("malformed report line {line}: {source}")]
    Malformed { line: usize, source: serde_json::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Jsonl,
}

/// Appends one row to `<run_dir>/report.jsonl`.
pub fn append_report(run_dir: &Path, report: &IterationReport) -> io::Result<()> {
    use std::io::Write;
    let mut f = fs::OpenOptions::new().create(true).append(true).open(run_dir.join(REPORT_FILE))?;
    f.write_all(to_jsonl(std::slice::from_ref(report)).as_bytes())
}

/// Keeps only the first `rows` lines of the report (used on resume).
pub fn truncate_report(run_dir: &Path, rows: usize) -> io::Result<()> {
    let path = run_dir.join(REPORT_FILE);
    let Ok(text) = fs::read_to_string(&path) else { return Ok(()) };
    let kept: String = text.lines().take(rows).map(|l| format!("{l}\n")).collect();
    fs::write(path, kept)
}

pub fn read_reports(run_dir: &Path) -> Result<Vec<IterationReport>, ReportError> {
    let path = run_dir.join(REPORT_FILE);
    if !path.is_file() {
        return Err(ReportError::MissingRun(run_dir.display().to_string()));
    }
    fs::read_to_string(&path)?
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|source| ReportError::Malformed { line: i + 1, source }))
        .collect()
}

pub fn render_report(reports: &[IterationReport], format: ReportFormat) -> Result<String, ReportError> {
    let rows: Vec<ReportRow> = reports.iter().map(ReportRow::from).collect();
    match format {
        ReportFormat::Jsonl => Ok(to_jsonl(&rows)),
        ReportFormat::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
            w.write_record(COLUMNS)?;
            for row in &rows {
                w.serialize(row)?;
            }
            Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv output is UTF-8"))
        }
    }
}

/// Reads `<run_dir>/report.jsonl` and renders it in `format`.
pub fn emit_report(run_dir: &Path, format: ReportFormat) -> Result<String, ReportError> {
    render_report(&read_reports(run_dir)?, format)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn buckets() {
        assert_eq!(bucket(0, 32), 0);
        assert_eq!(bucket(4, 32), 1);
        assert_eq!(bucket(5, 32), 2);
        assert_eq!(bucket(8, 32), 2);
        assert_eq!(bucket(9, 32), 3);
        assert_eq!(bucket(16, 32), 3);
        assert_eq!(bucket(17, 32), 4);
        assert_eq!(histogram([(0, 32), (8, 32), (32, 32)]), [1, 0, 1, 0, 1]);
    }

    #[test]
    fn cumulative_rate() {
        assert_eq!(IterationReport::pass_rate(10, 100), 0.10);
        assert_eq!(IterationReport::pass_rate(15, 100), 0.15);
    }

    #[test]
    fn empty_csv_has_header_only() {
        let csv = render_report(&[], ReportFormat::Csv).unwrap();
        assert_eq!(csv, COLUMNS.join(",") + "\n");
        assert_eq!(render_report(&[], ReportFormat::Jsonl).unwrap(), "");
    }

    #[test]
    fn missing_run() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(emit_report(dir.path(), ReportFormat::Csv), Err(ReportError::MissingRun(_))));
    }
}
