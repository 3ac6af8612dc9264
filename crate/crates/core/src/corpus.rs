//! Line-delimited JSON corpora in the DiverseVul layout.
//!
//! Records keep the seven documented columns as typed fields and carry
//! everything else through `extras` untouched. Dirty lines are skipped and
//! reported, never fatal. Enrichment output goes under `vc_`-prefixed keys.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::normalizer::{NormalizationResult, Normalizer, Status};

pub const ENRICHMENT_PREFIX: &str = "vc_";

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("serializing record: {0}")]
    Serialize(#[from] serde_json::Error),
}

impl CorpusError {
    fn io(path: &Path, source: io::Error) -> Self {
        CorpusError::Io {
            path: path.to_owned(),
            source,
        }
    }
}

/// A problem with one input line; the line is skipped.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    #[error("line {line}: malformed JSON: {message}")]
    MalformedLine { line: usize, message: String },
    #[error("line {line}: missing field `{name}`")]
    MissingField { line: usize, name: String },
    #[error("line {line}: invalid field `{name}`: {reason}")]
    InvalidField {
        line: usize,
        name: String,
        reason: String,
    },
}

/// One dataset row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionRecord {
    pub func: String,
    /// 0 = non-vulnerable, 1 = vulnerable.
    pub target: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cwe: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub project: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub commit_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    /// Unrecognized fields, preserved verbatim and written alphabetically.
    #[serde(flatten)]
    pub extras: BTreeMap<String, Value>,
}

impl FunctionRecord {
    pub fn new(func: impl Into<String>, target: u8) -> Self {
        FunctionRecord {
            func: func.into(),
            target,
            cwe: None,
            project: None,
            commit_id: None,
            size: None,
            message: None,
            extras: BTreeMap::new(),
        }
    }

    /// Validates one parsed JSON line.
    pub fn from_json(value: Value, line: usize) -> Result<Self, Diagnostic> {
        let Value::Object(mut obj) = value else {
            return Err(Diagnostic::MalformedLine {
                line,
                message: "expected a JSON object".into(),
            });
        };
        let invalid = |name: &str, reason: &str| Diagnostic::InvalidField {
            line,
            name: name.into(),
            reason: reason.into(),
        };

        let func = match obj.remove("func") {
            None | Some(Value::Null) => {
                return Err(Diagnostic::MissingField {
                    line,
                    name: "func".into(),
                })
            }
            Some(Value::String(s)) if s.is_empty() => return Err(invalid("func", "empty")),
            Some(Value::String(s)) => s,
            Some(_) => return Err(invalid("func", "expected a string")),
        };
        let target = match obj.remove("target") {
            None | Some(Value::Null) => {
                return Err(Diagnostic::MissingField {
                    line,
                    name: "target".into(),
                })
            }
            Some(v) => match v.as_u64() {
                Some(0) => 0,
                Some(1) => 1,
                _ => return Err(invalid("target", "expected 0 or 1")),
            },
        };
        let cwe = match obj.remove("cwe") {
            None | Some(Value::Null) => None,
            Some(Value::Array(items)) => {
                let mut out = Vec::with_capacity(items.len());
                for item in items {
                    match item {
                        Value::String(s) if is_cwe_id(&s) => out.push(s),
                        _ => return Err(invalid("cwe", "entries must look like CWE-<digits>")),
                    }
                }
                Some(out)
            }
            Some(_) => return Err(invalid("cwe", "expected a list")),
        };
        let mut text = |name: &str| -> Result<Option<String>, Diagnostic> {
            match obj.remove(name) {
                None | Some(Value::Null) => Ok(None),
                Some(Value::String(s)) => Ok(Some(s)),
                Some(_) => Err(invalid(name, "expected a string")),
            }
        };
        let project = text("project")?;
        let commit_id = text("commit_id")?;
        let message = text("message")?;
        let size = match obj.remove("size") {
            None | Some(Value::Null) => None,
            Some(v) => Some(v.as_i64().ok_or_else(|| invalid("size", "expected an integer"))?),
        };

        Ok(FunctionRecord {
            func,
            target,
            cwe,
            project,
            commit_id,
            size,
            message,
            extras: obj.into_iter().collect(),
        })
    }
}

fn is_cwe_id(s: &str) -> bool {
    s.strip_prefix("CWE-")
        .is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadReport {
    pub lines: usize,
    pub blank: usize,
    pub ok: usize,
    pub malformed: usize,
    pub missing_field: usize,
    pub invalid_field: usize,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Loaded {
    pub records: Vec<FunctionRecord>,
    /// 1-based source line of each record.
    pub line_numbers: Vec<usize>,
    pub report: LoadReport,
}

pub fn load_jsonl(path: impl AsRef<Path>) -> Result<Loaded, CorpusError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| CorpusError::io(path, e))?;
    read_jsonl(BufReader::new(file)).map_err(|e| CorpusError::io(path, e))
}

pub fn read_jsonl(reader: impl BufRead) -> io::Result<Loaded> {
    let mut loaded = Loaded::default();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        loaded.report.lines += 1;
        if line.trim().is_empty() {
            loaded.report.blank += 1;
            continue;
        }
        let parsed = serde_json::from_str::<Value>(&line)
            .map_err(|e| Diagnostic::MalformedLine {
                line: line_no,
                message: e.to_string(),
            })
            .and_then(|v| FunctionRecord::from_json(v, line_no));
        match parsed {
            Ok(record) => {
                loaded.report.ok += 1;
                loaded.records.push(record);
                loaded.line_numbers.push(line_no);
            }
            Err(d) => {
                match d {
                    Diagnostic::MalformedLine { .. } => loaded.report.malformed += 1,
                    Diagnostic::MissingField { .. } => loaded.report.missing_field += 1,
                    Diagnostic::InvalidField { .. } => loaded.report.invalid_field += 1,
                }
                loaded.report.diagnostics.push(d);
            }
        }
    }
    Ok(loaded)
}

/// Writes to a temporary sibling and renames it into place, so a failed
/// write never leaves a truncated file behind.
pub fn write_atomically<F>(path: impl AsRef<Path>, fill: F) -> Result<(), CorpusError>
where
    F: FnOnce(&mut dyn Write) -> Result<(), CorpusError>,
{
    let path = path.as_ref();
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CorpusError::io(path, e))?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        fill(&mut w)?;
        w.flush().map_err(|e| CorpusError::io(path, e))?;
    }
    tmp.persist(path)
        .map_err(|e| CorpusError::io(path, e.error))?;
    Ok(())
}

/// Pretty-printed JSON document followed by a newline.
pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<(), CorpusError> {
    let path = path.as_ref();
    write_atomically(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        w.write_all(b"\n").map_err(|e| CorpusError::io(path, e))
    })
}

#[derive(Serialize)]
struct Row<'a> {
    #[serde(flatten)]
    record: &'a FunctionRecord,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    enrichment: Option<Enrichment<'a>>,
}

#[derive(Serialize)]
struct Enrichment<'a> {
    vc_normalized: &'a str,
    vc_status: Status,
    vc_key: &'a str,
    vc_orig_tokens: usize,
    vc_norm_tokens: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    vc_subword_tokens: Option<usize>,
}

/// Serializes one record as a single JSON line (no trailing newline).
pub fn to_json_line(record: &FunctionRecord) -> Result<String, CorpusError> {
    Ok(serde_json::to_string(&Row {
        record,
        enrichment: None,
    })?)
}

pub fn enriched_json_line(record: &EnrichedRecord) -> Result<String, CorpusError> {
    Ok(serde_json::to_string(&Row {
        record: &record.record,
        enrichment: Some(Enrichment {
            vc_normalized: &record.norm.normalized,
            vc_status: record.norm.status,
            vc_key: &record.key,
            vc_orig_tokens: record.norm.orig_token_count,
            vc_norm_tokens: record.norm.norm_token_count,
            vc_subword_tokens: record.norm.subword_token_count,
        }),
    })?)
}

fn write_lines<T>(
    items: &[T],
    path: &Path,
    line: impl Fn(&T) -> Result<String, CorpusError>,
) -> Result<usize, CorpusError> {
    write_atomically(path, |w| {
        for item in items {
            let l = line(item)?;
            w.write_all(l.as_bytes())
                .and_then(|_| w.write_all(b"\n"))
                .map_err(|e| CorpusError::io(path, e))?;
        }
        Ok(())
    })?;
    Ok(items.len())
}

/// Writes records in order; field order is the seven known columns, then
/// extras alphabetically.
pub fn write_jsonl(records: &[FunctionRecord], path: impl AsRef<Path>) -> Result<usize, CorpusError> {
    write_lines(records, path.as_ref(), to_json_line)
}

/// Like [`write_jsonl`], followed by the `vc_` enrichment fields.
pub fn write_enriched_jsonl(
    records: &[EnrichedRecord],
    path: impl AsRef<Path>,
) -> Result<usize, CorpusError> {
    write_lines(records, path.as_ref(), enriched_json_line)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnrichedRecord {
    pub record: FunctionRecord,
    pub norm: NormalizationResult,
    /// Hex SHA-256 of `norm.normalized`.
    pub key: String,
}

pub fn content_key(normalized: &str) -> String {
    hex::encode(Sha256::digest(normalized.as_bytes()))
}

pub fn enrich(record: FunctionRecord) -> EnrichedRecord {
    enrich_with(&Normalizer::default(), record)
}

pub fn enrich_with(normalizer: &Normalizer, mut record: FunctionRecord) -> EnrichedRecord {
    record
        .extras
        .retain(|k, _| !k.starts_with(ENRICHMENT_PREFIX));
    let norm = normalizer.normalize(&record.func);
    let key = content_key(&norm.normalized);
    EnrichedRecord { record, norm, key }
}

/// Rebuilds enrichment from `vc_` fields written by an earlier run; the key
/// is recomputed from `vc_normalized`. Returns `None` if the fields are
/// absent or unusable.
pub fn reuse_enrichment(record: &FunctionRecord) -> Option<EnrichedRecord> {
    let get = |k: &str| record.extras.get(k);
    let normalized = get("vc_normalized")?.as_str()?.to_owned();
    let status: Status = get("vc_status")?.as_str()?.parse().ok()?;
    let count = |k: &str| get(k).and_then(Value::as_u64).map(|n| n as usize);
    let orig = count("vc_orig_tokens")?;
    let norm_count = count("vc_norm_tokens")?;
    let mut record = record.clone();
    record
        .extras
        .retain(|k, _| !k.starts_with(ENRICHMENT_PREFIX));
    let key = content_key(&normalized);
    Some(EnrichedRecord {
        record,
        norm: NormalizationResult {
            normalized,
            status,
            identifier_map: BTreeMap::new(),
            orig_token_count: orig,
            norm_token_count: norm_count,
            subword_token_count: count("vc_subword_tokens"),
        },
        key,
    })
}

/// Enriches every record in parallel; output order matches input order.
pub fn enrich_all(records: Vec<FunctionRecord>, normalizer: &Normalizer) -> Vec<EnrichedRecord> {
    records
        .into_par_iter()
        .map(|r| enrich_with(normalizer, r))
        .collect()
}

/// Reuses existing `vc_` fields where present, otherwise normalizes.
pub fn reuse_or_enrich_all(
    records: Vec<FunctionRecord>,
    normalizer: &Normalizer,
) -> Vec<EnrichedRecord> {
    records
        .into_par_iter()
        .map(|r| reuse_enrichment(&r).unwrap_or_else(|| enrich_with(normalizer, r)))
        .collect()
}

/// Per-status counts in a stable order.
pub fn status_counts(records: &[EnrichedRecord]) -> BTreeMap<Status, usize> {
    let mut counts: BTreeMap<Status, usize> = Status::ALL.iter().map(|s| (*s, 0)).collect();
    for r in records {
        *counts.entry(r.norm.status).or_default() += 1;
    }
    counts
}
