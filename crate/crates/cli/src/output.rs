use std::path::Path;

use serde::{Deserialize, Serialize};
use starfw::solver::IterationRecord;
use starfw::verify::BoundAuditReport;
use starfw::{ProblemSpec, RunReport};

use crate::error::{io_error, CliError};

pub const TRACE_HEADER: [&str; 7] = ["k", "f", "gap", "lambda", "L_est", "fevals_iter", "fevals_cum"];

/// Seventeen significant digits, enough to round-trip any double.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub fn trace_csv(records: &[IterationRecord]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Runtime(format!("writing trace: {e}"));
    w.write_record(TRACE_HEADER).map_err(csv_err)?;
    for r in records {
        w.write_record([
            r.k.to_string(),
            fmt_f64(r.f),
            fmt_f64(r.gap),
            fmt_opt(r.lambda),
            fmt_opt(r.l_est),
            r.fevals_iter.to_string(),
            r.fevals_cum.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.into_inner()
        .map_err(|e| CliError::Runtime(format!("writing trace: {e}")))
}

/// One audit as listed in `report.json`; the per-iteration rows live in the
/// CSV file next to the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub name: String,
    pub passed: bool,
    pub first_violation_k: Option<usize>,
    pub details_csv_path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl AuditEntry {
    pub fn from_report(a: &BoundAuditReport) -> Self {
        Self {
            name: a.name.clone(),
            passed: a.passed,
            first_violation_k: a.first_violation_k,
            details_csv_path: format!("audit_{}.csv", a.name),
            note: a.note.clone(),
        }
    }
}

/// Contents of `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub problem: ProblemSpec,
    #[serde(flatten)]
    pub run: RunReport,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub audits: Vec<AuditEntry>,
}

impl ReportFile {
    /// Replaces entries with the same name, keeping the order of first appearance.
    pub fn merge_audits(&mut self, audits: &[BoundAuditReport]) {
        for a in audits {
            let entry = AuditEntry::from_report(a);
            match self.audits.iter_mut().find(|e| e.name == entry.name) {
                Some(slot) => *slot = entry,
                None => self.audits.push(entry),
            }
        }
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

pub fn create_dir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path).map_err(|e| io_error(path, e))
}

/// Writes `trace.csv`, `report.json` and one CSV per audit into `dir`.
pub fn write_run(dir: &Path, report: &ReportFile, audits: &[BoundAuditReport]) -> Result<(), CliError> {
    create_dir(dir)?;
    write_file(&dir.join("trace.csv"), &trace_csv(&report.run.records)?)?;
    for a in audits {
        write_file(&dir.join(format!("audit_{}.csv", a.name)), a.details_csv().as_bytes())?;
    }
    let json = serde_json::to_vec_pretty(report)
        .map_err(|e| CliError::Runtime(format!("serializing report: {e}")))?;
    write_file(&dir.join("report.json"), &json)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_the_trace_format() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 12345.678901234567, f64::MIN_POSITIVE] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn trace_leaves_missing_values_empty() {
        let rec = IterationRecord {
            k: 3,
            f: 0.5,
            gap: -0.25,
            lambda: None,
            l_est: None,
            fevals_iter: 0,
            fevals_cum: 7,
        };
        let text = String::from_utf8(trace_csv(&[rec]).unwrap()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("k,f,gap,lambda,L_est,fevals_iter,fevals_cum"));
        assert_eq!(
            lines.next(),
            Some("3,5.0000000000000000e-1,-2.5000000000000000e-1,,,0,7")
        );
    }
}
