//! Keyword-based SATD detection over extracted build comments.
//!
//! Detection runs on the raw comment text, before any text preprocessing.
//! The default keyword list ships with the crate and can be replaced by a
//! plain-text file, one phrase per line.

use std::collections::HashSet;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::links::extract_links;
use crate::pom::{self, BuildComment, ScanIssue};
use crate::record::SatdRecord;

/// How a keyword phrase is matched against comment text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchMode {
    /// Phrase must appear bounded by non-alphanumerics or string edges.
    WordBoundary,
    /// Plain substring containment.
    Substring,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordPattern {
    /// Lowercase phrase.
    pub phrase: String,
    pub match_mode: MatchMode,
}

/// An ordered, deduplicated set of detection phrases.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordSet {
    pub patterns: Vec<KeywordPattern>,
    /// Where the set came from: `"default-v1"` or a user file path.
    pub source_tag: String,
}

const DEFAULT_KEYWORDS: &str = include_str!("../data/keywords-default.txt");

/// Load a keyword set from `source`, or the bundled default list when no
/// source is given.
pub fn load_keyword_set(source: Option<&Path>) -> Result<KeywordSet> {
    match source {
        None => parse_keyword_lines(DEFAULT_KEYWORDS, "default-v1"),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            parse_keyword_lines(&text, &path.display().to_string())
        }
    }
}

fn parse_keyword_lines(text: &str, source_tag: &str) -> Result<KeywordSet> {
    let mut patterns = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (mode, phrase) = match line.strip_prefix('!') {
            Some(rest) => (MatchMode::Substring, rest.trim()),
            None => (MatchMode::WordBoundary, line),
        };
        let phrase = phrase.to_lowercase();
        if phrase.is_empty() {
            return Err(Error::MalformedKeywordFile {
                line: i + 1,
                message: "empty phrase".into(),
            });
        }
        if phrase.contains("<!--") || phrase.contains("-->") {
            return Err(Error::MalformedKeywordFile {
                line: i + 1,
                message: "phrase contains a comment delimiter".into(),
            });
        }
        if seen.insert(phrase.clone()) {
            patterns.push(KeywordPattern {
                phrase,
                match_mode: mode,
            });
        }
    }
    if patterns.is_empty() {
        return Err(Error::EmptyKeywordSet);
    }
    Ok(KeywordSet {
        patterns,
        source_tag: source_tag.to_string(),
    })
}

/// Outcome of matching one comment against a keyword set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Detection {
    pub is_satd: bool,
    /// Every phrase that hit, in keyword-set order.
    pub matched: Vec<String>,
}

/// Case-insensitive keyword matching over raw comment text.
pub fn detect_satd(text: &str, ks: &KeywordSet) -> Detection {
    let lower = text.to_lowercase();
    let matched: Vec<String> = ks
        .patterns
        .iter()
        .filter(|p| match p.match_mode {
            MatchMode::Substring => lower.contains(&p.phrase),
            MatchMode::WordBoundary => contains_bounded(&lower, &p.phrase),
        })
        .map(|p| p.phrase.clone())
        .collect();
    Detection {
        is_satd: !matched.is_empty(),
        matched,
    }
}

/// `phrase` occurs in `haystack` with non-alphanumeric characters (or string
/// edges) on both sides.
fn contains_bounded(haystack: &str, phrase: &str) -> bool {
    let mut from = 0;
    while let Some(pos) = haystack[from..].find(phrase) {
        let start = from + pos;
        let end = start + phrase.len();
        let left_ok = start == 0
            || !haystack[..start]
                .chars()
                .next_back()
                .is_some_and(|c| c.is_alphanumeric());
        let right_ok = end == haystack.len()
            || !haystack[end..]
                .chars()
                .next()
                .is_some_and(|c| c.is_alphanumeric());
        if left_ok && right_ok {
            return true;
        }
        from = start + phrase.chars().next().map_or(1, char::len_utf8);
    }
    false
}

/// Full-corpus detection result.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusScan {
    pub n_repos: usize,
    pub n_build_files: usize,
    pub n_comments: usize,
    pub n_satd: usize,
    /// Only SATD-positive comments.
    pub records: Vec<SatdRecord>,
    /// Files skipped with reasons (I/O or parse failures).
    pub skipped: Vec<ScanIssue>,
}

/// Extract all comments for `root` without detection, in deterministic order.
pub fn scan_comments(
    root: &Path,
    pattern: &str,
) -> Result<(Vec<BuildComment>, usize, usize, Vec<ScanIssue>)> {
    let (files, mut skipped) = pom::discover_build_files(root, pattern)?;
    let n_build_files = files.len();
    let repos: HashSet<&str> = files.iter().map(|f| f.repo_id.as_str()).collect();
    let n_repos = repos.len();
    // Per-file extraction is pure; results merge in path order, so the
    // outcome is independent of scheduling.
    let mut per_file: Vec<(usize, std::result::Result<Vec<BuildComment>, ScanIssue>)> = files
        .par_iter()
        .enumerate()
        .map(|(i, file)| {
            let path = root.join(&file.rel_path);
            let out = match std::fs::read(&path) {
                Ok(bytes) => {
                    let content = String::from_utf8_lossy(&bytes);
                    extract_or_issue(file, &content)
                }
                Err(e) => Err(ScanIssue {
                    path: file.rel_path.clone(),
                    reason: e.to_string(),
                }),
            };
            (i, out)
        })
        .collect();
    per_file.sort_by_key(|(i, _)| *i);
    let mut comments = Vec::new();
    for (_, out) in per_file {
        match out {
            Ok(list) => comments.extend(list),
            Err(issue) => skipped.push(issue),
        }
    }
    Ok((comments, n_repos, n_build_files, skipped))
}

fn extract_or_issue(
    file: &pom::BuildFile,
    content: &str,
) -> std::result::Result<Vec<BuildComment>, ScanIssue> {
    pom::extract_comments(file, content).map_err(|e| ScanIssue {
        path: file.rel_path.clone(),
        reason: e.to_string(),
    })
}

/// Compose discovery, extraction, detection, and location mapping over a
/// directory tree. Per-file failures are recorded and never fatal.
pub fn scan_corpus(root: &Path, pattern: &str, ks: &KeywordSet) -> Result<CorpusScan> {
    let (comments, n_repos, n_build_files, skipped) = scan_comments(root, pattern)?;
    let n_comments = comments.len();
    let mut records = Vec::new();
    // Record ids number every comment within its file, so an id is stable
    // regardless of which keyword set flagged it.
    let mut ordinal_in_file = 0usize;
    let mut current_file = String::new();
    for comment in comments {
        if comment.file.rel_path != current_file {
            current_file = comment.file.rel_path.clone();
            ordinal_in_file = 0;
        }
        ordinal_in_file += 1;
        let detection = detect_satd(&comment.text, ks);
        if !detection.is_satd {
            continue;
        }
        let id = format!(
            "{}:{}:{}",
            comment.file.rel_path, comment.line_start, ordinal_in_file
        );
        let location = pom::classify_location(&comment);
        let links = extract_links(&comment.text);
        records.push(SatdRecord::from_comment(
            id, comment, detection, location, links,
        ));
    }
    Ok(CorpusScan {
        n_repos,
        n_build_files,
        n_comments,
        n_satd: records.len(),
        records,
        skipped,
    })
}
