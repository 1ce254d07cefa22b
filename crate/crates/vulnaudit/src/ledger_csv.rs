//! Review ledger as a flat CSV, editable in any spreadsheet:
//! `corpus,ordinal,fingerprint,cwe,cve_id,commit_url,accuracy,completeness,unverifiable,reviewer,notes`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use vulnaudit_core::ledger::{Accuracy, Completeness, ReviewRecord, SampleRef};

use crate::error::{Error, Result};

pub const LEDGER_COLUMNS: [&str; 11] = [
    "corpus",
    "ordinal",
    "fingerprint",
    "cwe",
    "cve_id",
    "commit_url",
    "accuracy",
    "completeness",
    "unverifiable",
    "reviewer",
    "notes",
];

#[derive(Debug, Serialize, Deserialize)]
struct LedgerRow {
    corpus: String,
    ordinal: usize,
    fingerprint: String,
    cwe: String,
    cve_id: String,
    commit_url: String,
    accuracy: String,
    completeness: String,
    unverifiable: String,
    reviewer: String,
    notes: String,
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "y" => Some(true),
        "false" | "no" | "0" | "n" | "" => Some(false),
        _ => None,
    }
}

fn opt(s: String) -> Option<String> {
    (!s.is_empty()).then_some(s)
}

pub fn write_ledger(path: &Path, records: &[ReviewRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    // an empty ledger still gets its header
    if records.is_empty() {
        w.write_record(LEDGER_COLUMNS)
            .map_err(|e| csv_err(path, e))?;
    }
    for r in records {
        w.serialize(LedgerRow {
            corpus: r.sample_ref.corpus.clone(),
            ordinal: r.sample_ref.ordinal,
            fingerprint: r.sample_ref.fingerprint.to_string(),
            cwe: r.cwe_label.clone(),
            cve_id: r.cve_id.clone().unwrap_or_default(),
            commit_url: r.commit_url.clone().unwrap_or_default(),
            accuracy: r.accuracy.to_string(),
            completeness: r.completeness.to_string(),
            unverifiable: r.unverifiable.to_string(),
            reviewer: r.reviewer.clone(),
            notes: r.notes.clone(),
        })
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads and validates a ledger; errors name the offending data row.
pub fn read_ledger(path: &Path) -> Result<Vec<ReviewRecord>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let headers = rdr.headers().map_err(|e| csv_err(path, e))?.clone();
    for column in LEDGER_COLUMNS {
        if !headers.iter().any(|h| h == column) {
            return Err(Error::ColumnMissing {
                path: path.to_path_buf(),
                column: column.into(),
            });
        }
    }
    let mut records = Vec::new();
    for (row, result) in rdr.records().enumerate() {
        let record = result.map_err(|e| csv_err(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let bad = |reason: String| Error::MalformedRow {
            path: path.to_path_buf(),
            row,
            line,
            reason,
        };
        let r: LedgerRow = record
            .deserialize(Some(&headers))
            .map_err(|e| bad(e.to_string()))?;
        let fingerprint = r
            .fingerprint
            .parse()
            .map_err(|e| bad(format!("fingerprint: {e}")))?;
        let accuracy: Accuracy = r.accuracy.parse().map_err(|e| bad(format!("{e}")))?;
        let completeness: Completeness = r.completeness.parse().map_err(|e| bad(format!("{e}")))?;
        let unverifiable = parse_bool(&r.unverifiable)
            .ok_or_else(|| bad(format!("unverifiable: not a boolean `{}`", r.unverifiable)))?;
        records.push(ReviewRecord {
            sample_ref: SampleRef {
                corpus: r.corpus,
                ordinal: r.ordinal,
                fingerprint,
            },
            cwe_label: r.cwe,
            cve_id: opt(r.cve_id),
            commit_url: opt(r.commit_url),
            accuracy,
            completeness,
            unverifiable,
            notes: r.notes,
            reviewer: r.reviewer,
        });
    }
    Ok(records)
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Format {
            path: path.to_path_buf(),
            reason: format!("{other:?}"),
        },
    }
}
