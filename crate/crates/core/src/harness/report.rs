//! CSV and JSON artifacts of PAC experiments.
//!
//! `trials.csv` has one row per trial and theory with the columns in
//! [`TRIAL_COLUMNS`]. Accuracies measured on samples are exact fractions
//! written as `p/q`; absent values are empty cells. `summary.json` holds the
//! schema version, the resolved configuration and the run summary.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::pac::{PacConfig, PacRun, PacSummary, TrialRecord};

/// Version of the CSV and JSON layouts; bumped on any incompatible change.
pub const SCHEMA_VERSION: u32 = 1;

pub const TRIAL_COLUMNS: [&str; 24] = [
    "trial",
    "seed",
    "train_digest",
    "test_domain",
    "theory",
    "selected",
    "q_train",
    "q_test",
    "q_global",
    "errors_k",
    "errors_vote",
    "prop3",
    "prop4",
    "thm7",
    "thm8",
    "thm9",
    "thm9_form2",
    "thm10",
    "thm10_fraction",
    "prop3_violation",
    "prop4_violation",
    "thm9_violation",
    "thm10_violation",
    "schema_version",
];

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Serializes trial records as CSV. An empty list gives the header line only.
pub fn trials_csv(seed: u64, records: &[TrialRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(TRIAL_COLUMNS).map_err(csv_err)?;
    for r in records {
        for (i, o) in r.outcomes.iter().enumerate() {
            w.write_record([
                r.trial.to_string(),
                seed.to_string(),
                r.train_digest.clone(),
                r.test_domain.join(" "),
                i.to_string(),
                (r.selected == i).to_string(),
                o.q_train.to_string(),
                o.q_test.to_string(),
                o.q_global.to_string(),
                o.errors_k.to_string(),
                opt(o.errors_vote),
                o.prop3.to_string(),
                opt(o.prop4),
                opt(o.thm7),
                o.thm8.to_string(),
                o.thm9.to_string(),
                o.thm9_form2.to_string(),
                opt(o.thm10),
                opt(o.thm10_fraction),
                r.prop3_violation.to_string(),
                opt(r.prop4_violation),
                r.thm9_violation.to_string(),
                opt(r.thm10_violation),
                SCHEMA_VERSION.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Serialize)]
struct SummaryDocument<'a> {
    schema_version: u32,
    config: &'a PacConfig,
    summary: &'a PacSummary,
}

/// Pretty-printed summary JSON with a trailing newline.
pub fn summary_json(run: &PacRun) -> String {
    let doc = SummaryDocument {
        schema_version: SCHEMA_VERSION,
        config: &run.config,
        summary: &run.summary,
    };
    serde_json::to_string_pretty(&doc).expect("summary serializes") + "\n"
}

/// Writes `trials.csv` and `summary.json` into `dir`, creating it if needed.
pub fn write_reports(run: &PacRun, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let csv_path = dir.join("trials.csv");
    let json_path = dir.join("summary.json");
    fs::write(&csv_path, trials_csv(run.config.seed, &run.records)?)?;
    fs::write(&json_path, summary_json(run))?;
    Ok((csv_path, json_path))
}
