//! Run records as JSON lines, front CSVs, and atomic file output.
//!
//! A record file holds one JSON object per line, discriminated by `type`:
//!
//! * `header`: template name, repetition index and the settings echo
//!   (including the run seed),
//! * `iteration`: one per evaluation, in order, with the cumulative
//!   hypervolume after it,
//! * `summary`: status, final hypervolume, final Pareto front and any events.
//!
//! Wall-clock times never enter a record, so equal specs give byte-identical
//! files.

use std::fs;
use std::io::Write;
use std::path::Path;

use priorbo_core::optimizer::{RunEntry, RunEvent, RunRecord, RunStatus, SpecEcho};
use priorbo_core::pareto::ParetoFront;
use serde::{Deserialize, Serialize};

use crate::config::json_message;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum RecordLine {
    Header {
        template: String,
        repetition: usize,
        spec: SpecEcho,
    },
    Iteration(RunEntry),
    Summary {
        status: RunStatus,
        final_hypervolume: f64,
        front: ParetoFront,
        events: Vec<RunEvent>,
    },
}

/// A record together with its campaign coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledRecord {
    pub template: String,
    pub repetition: usize,
    pub record: RunRecord,
}

impl LabeledRecord {
    pub fn to_jsonl(&self) -> String {
        let r = &self.record;
        let mut lines = Vec::with_capacity(r.entries.len() + 2);
        lines.push(RecordLine::Header {
            template: self.template.clone(),
            repetition: self.repetition,
            spec: r.spec.clone(),
        });
        lines.extend(r.entries.iter().cloned().map(RecordLine::Iteration));
        lines.push(RecordLine::Summary {
            status: r.status,
            final_hypervolume: r.final_hypervolume(),
            front: r.front.clone(),
            events: r.events.clone(),
        });
        let mut out = String::new();
        for line in &lines {
            out.push_str(&serde_json::to_string(line).expect("records serialize"));
            out.push('\n');
        }
        out
    }

    /// Parses a record file, checking the header/iterations/summary layout.
    /// Errors are prefixed with `source` and the offending line number.
    pub fn from_jsonl(text: &str, source: &str) -> CliResult<Self> {
        let mut header = None;
        let mut entries = Vec::new();
        let mut summary = None;
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let bad = |msg: &str| CliError::usage(format!("{source}:{lineno}: {msg}"));
            let line: RecordLine = serde_json::from_str(raw)
                .map_err(|e| CliError::usage(format!("{source}:{lineno}:{}: {}", e.column(), json_message(&e))))?;
            if summary.is_some() {
                return Err(bad("content after the summary line"));
            }
            match line {
                RecordLine::Header { template, repetition, spec } => {
                    if header.is_some() {
                        return Err(bad("second header"));
                    }
                    header = Some((template, repetition, spec));
                }
                RecordLine::Iteration(entry) => {
                    if header.is_none() {
                        return Err(bad("iteration before the header"));
                    }
                    if entry.index != entries.len() {
                        return Err(bad(&format!("expected iteration {}, found {}", entries.len(), entry.index)));
                    }
                    entries.push(entry);
                }
                RecordLine::Summary { status, front, events, .. } => {
                    if header.is_none() {
                        return Err(bad("summary before the header"));
                    }
                    summary = Some((status, front, events));
                }
            }
        }
        let (template, repetition, spec) =
            header.ok_or_else(|| CliError::usage(format!("{source}: missing header line")))?;
        let (status, front, events) =
            summary.ok_or_else(|| CliError::usage(format!("{source}: missing summary line")))?;
        Ok(Self { template, repetition, record: RunRecord { spec, entries, front, status, events } })
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_jsonl(&text, &path.display().to_string())
    }
}

/// Front as CSV: parameter columns, then objective columns, one row per entry.
pub fn front_csv(front: &ParetoFront, parameter_names: &[String], objective_names: &[String]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<&str> = parameter_names.iter().chain(objective_names).map(String::as_str).collect();
    w.write_record(&header).map_err(csv_error)?;
    for e in &front.entries {
        let row = e.configuration.values.iter().chain(&e.objectives.values).map(|v| v.to_string());
        w.write_record(row).map_err(csv_error)?;
    }
    finish_csv(w)
}

pub(crate) fn csv_error(e: csv::Error) -> CliError {
    CliError::runtime(format!("csv: {e}"))
}

pub(crate) fn finish_csv(w: csv::Writer<Vec<u8>>) -> CliResult<String> {
    let bytes = w.into_inner().map_err(|e| CliError::runtime(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Writes `contents` to a temporary file next to `path`, then renames it.
pub fn write_atomic(path: &Path, contents: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}
