//! The SATD record: the JSONL interchange spine connecting every pipeline
//! stage, plus validated ingest of hand-coded corpora.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::detect::Detection;
use crate::error::{Error, Result};
use crate::labels::{PurposeLabel, ReasonCategory, ReasonLabel, ReasonSubcategory};
use crate::links::LinkRef;
use crate::pom::{BuildComment, LocationCategory};

pub const SCHEMA_VERSION: u32 = 1;

/// One comment as emitted by `scan` (before detection).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommentRecord {
    pub schema_version: u32,
    pub repo: String,
    pub path: String,
    pub line_start: usize,
    pub line_end: usize,
    pub enclosing_path: Vec<String>,
    pub annotated_sibling: Option<String>,
    pub text: String,
    pub location: LocationCategory,
}

impl CommentRecord {
    pub fn from_comment(comment: &BuildComment, location: LocationCategory) -> Self {
        CommentRecord {
            schema_version: SCHEMA_VERSION,
            repo: comment.file.repo_id.clone(),
            path: comment.file.rel_path.clone(),
            line_start: comment.line_start,
            line_end: comment.line_end,
            enclosing_path: comment.enclosing_path.clone(),
            annotated_sibling: comment.annotated_sibling.clone(),
            text: comment.text.clone(),
            location,
        }
    }
}

/// A predicted merged label with its per-class scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: String,
    pub scores: BTreeMap<String, f64>,
}

/// Classifier output attached to a record.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Predicted {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<Prediction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub purpose: Option<Prediction>,
}

/// One detected SATD comment with everything later stages attach to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SatdRecord {
    pub schema_version: u32,
    pub id: String,
    pub repo: String,
    pub path: String,
    pub line_start: usize,
    pub line_end: usize,
    pub enclosing_path: Vec<String>,
    pub annotated_sibling: Option<String>,
    pub text: String,
    pub location: LocationCategory,
    pub is_satd: bool,
    pub matched: Vec<String>,
    /// Hand-coded reason, present only in ingested coded corpora.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<ReasonLabel>,
    /// Hand-coded purpose, present only in ingested coded corpora.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub purpose: Option<PurposeLabel>,
    /// Classifier output, present only after `classify`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicted: Option<Predicted>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub links: Vec<LinkRef>,
    /// Human judgment that the linked issue is a cross-reference (supplied
    /// in the corpus file, never inferred).
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub cross_reference_flag: bool,
}

impl SatdRecord {
    pub fn from_comment(
        id: String,
        comment: BuildComment,
        detection: Detection,
        location: LocationCategory,
        links: Vec<LinkRef>,
    ) -> Self {
        SatdRecord {
            schema_version: SCHEMA_VERSION,
            id,
            repo: comment.file.repo_id,
            path: comment.file.rel_path,
            line_start: comment.line_start,
            line_end: comment.line_end,
            enclosing_path: comment.enclosing_path,
            annotated_sibling: comment.annotated_sibling,
            text: comment.text,
            location,
            is_satd: detection.is_satd,
            matched: detection.matched,
            reason: None,
            purpose: None,
            predicted: None,
            links,
            cross_reference_flag: false,
        }
    }
}

/// Write records as one JSON object per line.
pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    for item in items {
        let line = serde_json::to_string(item)?;
        out.write_all(line.as_bytes()).map_err(|e| Error::io(path, e))?;
        out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Reload a comments JSONL file (the `scan` output schema).
pub fn read_comment_jsonl(path: &Path) -> Result<Vec<CommentRecord>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: CommentRecord = serde_json::from_str(&line).map_err(|e| Error::Schema {
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}

/// Load and validate a JSONL corpus of SATD records. Category names must be
/// canonical; violations are reported with their line number.
pub fn ingest_coded_corpus(path: &Path) -> Result<Vec<SatdRecord>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_record_line(&line, i + 1)?);
    }
    Ok(out)
}

/// Raw shape of one corpus line; labels arrive as free strings so that bad
/// category names can be reported precisely.
#[derive(Deserialize)]
struct RawRecord {
    #[serde(default)]
    schema_version: Option<u32>,
    #[serde(default)]
    id: Option<String>,
    #[serde(default)]
    repo: Option<String>,
    #[serde(default)]
    path: Option<String>,
    #[serde(default)]
    line_start: Option<usize>,
    #[serde(default)]
    line_end: Option<usize>,
    #[serde(default)]
    enclosing_path: Option<Vec<String>>,
    #[serde(default)]
    annotated_sibling: Option<String>,
    text: Option<String>,
    #[serde(default)]
    location: Option<String>,
    #[serde(default)]
    is_satd: Option<bool>,
    #[serde(default)]
    matched: Option<Vec<String>>,
    #[serde(default)]
    reason: Option<RawReason>,
    #[serde(default)]
    purpose: Option<String>,
    #[serde(default)]
    predicted: Option<Predicted>,
    #[serde(default)]
    links: Option<Vec<LinkRef>>,
    #[serde(default)]
    cross_reference_flag: Option<bool>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawReason {
    Name(String),
    Full {
        category: String,
        #[serde(default)]
        subcategory: Option<String>,
    },
}

fn parse_record_line(line: &str, line_no: usize) -> Result<SatdRecord> {
    let raw: RawRecord = serde_json::from_str(line).map_err(|e| Error::Schema {
        line: line_no,
        message: e.to_string(),
    })?;
    let text = raw.text.ok_or_else(|| Error::Schema {
        line: line_no,
        message: "missing required field `text`".into(),
    })?;
    let location = match raw.location {
        Some(name) => parse_enum::<LocationCategory>(&name, line_no)?,
        None => LocationCategory::Unclassified,
    };
    let reason = match raw.reason {
        None => None,
        Some(RawReason::Name(name)) => Some(ReasonLabel::new(parse_enum::<ReasonCategory>(
            &name, line_no,
        )?)),
        Some(RawReason::Full {
            category,
            subcategory,
        }) => {
            let category = parse_enum::<ReasonCategory>(&category, line_no)?;
            let subcategory = subcategory
                .map(|s| parse_enum::<ReasonSubcategory>(&s, line_no))
                .transpose()?;
            let label = ReasonLabel {
                category,
                subcategory,
            };
            if !label.is_consistent() {
                return Err(Error::Schema {
                    line: line_no,
                    message: format!(
                        "subcategory {:?} does not belong to category {:?}",
                        label.subcategory, label.category
                    ),
                });
            }
            Some(label)
        }
    };
    let purpose = raw
        .purpose
        .map(|p| parse_enum::<PurposeLabel>(&p, line_no))
        .transpose()?;
    let repo = raw.repo.unwrap_or_default();
    let path = raw.path.unwrap_or_default();
    let line_start = raw.line_start.unwrap_or(0);
    let id = raw
        .id
        .unwrap_or_else(|| format!("{repo}:{path}:{line_start}"));
    Ok(SatdRecord {
        schema_version: raw.schema_version.unwrap_or(SCHEMA_VERSION),
        id,
        repo,
        path,
        line_start,
        line_end: raw.line_end.unwrap_or(line_start),
        enclosing_path: raw.enclosing_path.unwrap_or_default(),
        annotated_sibling: raw.annotated_sibling,
        text,
        location,
        is_satd: raw.is_satd.unwrap_or(true),
        matched: raw.matched.unwrap_or_default(),
        reason,
        purpose,
        predicted: raw.predicted,
        links: raw.links.unwrap_or_default(),
        cross_reference_flag: raw.cross_reference_flag.unwrap_or(false),
    })
}

/// Parse a canonical category name via its serde rename, mapping failures to
/// `UnknownCategory` with the offending value.
fn parse_enum<T: serde::de::DeserializeOwned>(name: &str, line_no: usize) -> Result<T> {
    serde_json::from_value(serde_json::Value::String(name.to_string())).map_err(|_| {
        Error::UnknownCategory {
            line: line_no,
            value: name.to_string(),
        }
    })
}
