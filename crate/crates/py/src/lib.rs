//! Python bindings for the build-SATD toolkit.
//!
//! Exposes the text pipeline, keyword detection, corpus scanning, the
//! agreement/sampling statistics, link mining, and fixture-backed readiness
//! triage. Build as a cdylib and import as `buildsatd_py`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use buildsatd::detect;
use buildsatd::eval;
use buildsatd::forge::FixtureClient;
use buildsatd::links;
use buildsatd::pom;
use buildsatd::readiness;
use buildsatd::record::{ingest_coded_corpus, SatdRecord};
use buildsatd::text;

fn err(e: buildsatd::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Preprocess raw comment text into lowercase lemmas (hyperlinks become the
/// `abstracturl` token).
#[pyfunction]
fn preprocess(text: &str) -> Vec<String> {
    text::preprocess(text).tokens
}

/// Weight of an n-gram given its exact-phrase document frequency, its
/// co-occurrence document frequency, and the corpus size.
#[pyfunction]
fn ngram_idf_weight(df_phrase: usize, df_set: usize, n: usize) -> PyResult<f64> {
    text::ngram_idf_weight(df_phrase, df_set, n).map_err(err)
}

/// Chance-corrected agreement between two label sequences.
#[pyfunction]
fn cohen_kappa(a: Vec<String>, b: Vec<String>) -> PyResult<f64> {
    eval::cohen_kappa(&a, &b).map_err(err)
}

/// Sample size for a proportion estimate with finite population correction.
#[pyfunction]
#[pyo3(signature = (population, confidence=0.95, margin=0.05))]
fn representative_sample_size(population: u64, confidence: f64, margin: f64) -> PyResult<u64> {
    eval::representative_sample_size(population, confidence, margin).map_err(err)
}

/// Mined links as (kind, raw) pairs, where kind is "url", "github_issue",
/// or "jira".
#[pyfunction]
fn extract_links(text: &str) -> Vec<(String, String)> {
    links::extract_links(text)
        .into_iter()
        .map(|l| {
            let kind = match l.kind {
                links::LinkKind::Url { .. } => "url",
                links::LinkKind::GithubIssue { .. } => "github_issue",
                links::LinkKind::JiraKey { .. } => "jira",
            };
            (kind.to_string(), l.raw)
        })
        .collect()
}

/// Map a comment's enclosing element path (root first) and optional
/// following sibling to its build-file location category.
#[pyfunction]
#[pyo3(signature = (enclosing_path, annotated_sibling=None))]
fn classify_location(enclosing_path: Vec<String>, annotated_sibling: Option<String>) -> String {
    let comment = pom::BuildComment {
        file: pom::BuildFile {
            repo_id: String::new(),
            rel_path: String::new(),
            content_hash: String::new(),
            total_loc: 0,
        },
        text: String::new(),
        line_start: 1,
        line_end: 1,
        enclosing_path,
        annotated_sibling,
    };
    pom::classify_location(&comment).name().to_string()
}

/// Non-blank lines per location category for one build file's XML text.
/// Categories with zero lines are omitted.
#[pyfunction]
fn measure_location_loc(content: &str) -> PyResult<BTreeMap<String, usize>> {
    let counts = pom::measure_location_loc(content).map_err(err)?;
    Ok(counts
        .into_iter()
        .filter(|(_, n)| *n > 0)
        .map(|(cat, n)| (cat.name().to_string(), n))
        .collect())
}

/// A detection keyword list (bundled default, or loaded from a file).
#[pyclass]
struct KeywordSet {
    inner: detect::KeywordSet,
}

#[pymethods]
impl KeywordSet {
    #[new]
    #[pyo3(signature = (path=None))]
    fn new(path: Option<PathBuf>) -> PyResult<Self> {
        let inner = detect::load_keyword_set(path.as_deref()).map_err(err)?;
        Ok(KeywordSet { inner })
    }

    #[getter]
    fn phrases(&self) -> Vec<String> {
        self.inner.patterns.iter().map(|p| p.phrase.clone()).collect()
    }

    #[getter]
    fn source_tag(&self) -> String {
        self.inner.source_tag.clone()
    }

    /// (is_satd, matched phrases) for one comment text.
    fn detect(&self, text: &str) -> (bool, Vec<String>) {
        let d = detect::detect_satd(text, &self.inner);
        (d.is_satd, d.matched)
    }

    fn __repr__(&self) -> String {
        format!(
            "KeywordSet({} phrases from {})",
            self.inner.patterns.len(),
            self.inner.source_tag
        )
    }
}

/// One detected SATD comment.
#[pyclass(frozen)]
struct Record {
    inner: SatdRecord,
}

#[pymethods]
impl Record {
    #[getter]
    fn id(&self) -> &str {
        &self.inner.id
    }
    #[getter]
    fn repo(&self) -> &str {
        &self.inner.repo
    }
    #[getter]
    fn path(&self) -> &str {
        &self.inner.path
    }
    #[getter]
    fn line_start(&self) -> usize {
        self.inner.line_start
    }
    #[getter]
    fn line_end(&self) -> usize {
        self.inner.line_end
    }
    #[getter]
    fn text(&self) -> &str {
        &self.inner.text
    }
    #[getter]
    fn location(&self) -> &str {
        self.inner.location.name()
    }
    #[getter]
    fn matched(&self) -> Vec<String> {
        self.inner.matched.clone()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!(
            "Record({} @ {}:{})",
            self.inner.id, self.inner.path, self.inner.line_start
        )
    }
}

/// Corpus-level detection summary plus the SATD records.
#[pyclass(frozen)]
struct ScanResult {
    #[pyo3(get)]
    n_repos: usize,
    #[pyo3(get)]
    n_build_files: usize,
    #[pyo3(get)]
    n_comments: usize,
    #[pyo3(get)]
    n_satd: usize,
    #[pyo3(get)]
    skipped: Vec<String>,
    records: Vec<SatdRecord>,
}

#[pymethods]
impl ScanResult {
    #[getter]
    fn records(&self) -> Vec<Record> {
        self.records
            .iter()
            .cloned()
            .map(|inner| Record { inner })
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "ScanResult({} repos, {} files, {} comments, {} satd)",
            self.n_repos, self.n_build_files, self.n_comments, self.n_satd
        )
    }
}

/// Scan a directory tree of build files and detect SATD comments.
#[pyfunction]
#[pyo3(signature = (root, pattern="pom.xml", keywords=None))]
fn scan_corpus(root: PathBuf, pattern: &str, keywords: Option<PathBuf>) -> PyResult<ScanResult> {
    let ks = detect::load_keyword_set(keywords.as_deref()).map_err(err)?;
    let scan = detect::scan_corpus(&root, pattern, &ks).map_err(err)?;
    Ok(ScanResult {
        n_repos: scan.n_repos,
        n_build_files: scan.n_build_files,
        n_comments: scan.n_comments,
        n_satd: scan.n_satd,
        skipped: scan
            .skipped
            .iter()
            .map(|s| format!("{}: {}", s.path, s.reason))
            .collect(),
        records: scan.records,
    })
}

/// Triage records against recorded forge payloads. Returns
/// (record_id, outcome, exclusion_rule) triples.
#[pyfunction]
fn assess_readiness_fixtures(
    input_jsonl: PathBuf,
    fixtures_dir: PathBuf,
) -> PyResult<Vec<(String, String, Option<String>)>> {
    let records = ingest_coded_corpus(&input_jsonl).map_err(err)?;
    let client = FixtureClient::new(&fixtures_dir);
    Ok(readiness::assess_records(&records, &client)
        .into_iter()
        .map(|(id, verdict)| {
            let rule = match verdict.outcome {
                readiness::Outcome::Excluded { rule } => Some(format!("{rule:?}")),
                _ => None,
            };
            (id, verdict.outcome.name().to_string(), rule)
        })
        .collect())
}

/// (line_start, line_end, enclosing_path, annotated_sibling, text).
type CommentTuple = (usize, usize, Vec<String>, Option<String>, String);

/// Extract all comments of one build file's XML text.
#[pyfunction]
fn extract_comments(content: &str) -> PyResult<Vec<CommentTuple>> {
    let file = pom::BuildFile {
        repo_id: String::new(),
        rel_path: String::new(),
        content_hash: String::new(),
        total_loc: pom::count_non_blank_lines(content),
    };
    let comments = pom::extract_comments(&file, content).map_err(err)?;
    Ok(comments
        .into_iter()
        .map(|c| {
            (
                c.line_start,
                c.line_end,
                c.enclosing_path,
                c.annotated_sibling,
                c.text,
            )
        })
        .collect())
}

#[pymodule]
fn buildsatd_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<KeywordSet>()?;
    m.add_class::<Record>()?;
    m.add_class::<ScanResult>()?;
    m.add_function(wrap_pyfunction!(preprocess, m)?)?;
    m.add_function(wrap_pyfunction!(ngram_idf_weight, m)?)?;
    m.add_function(wrap_pyfunction!(cohen_kappa, m)?)?;
    m.add_function(wrap_pyfunction!(representative_sample_size, m)?)?;
    m.add_function(wrap_pyfunction!(extract_links, m)?)?;
    m.add_function(wrap_pyfunction!(classify_location, m)?)?;
    m.add_function(wrap_pyfunction!(measure_location_loc, m)?)?;
    m.add_function(wrap_pyfunction!(extract_comments, m)?)?;
    m.add_function(wrap_pyfunction!(scan_corpus, m)?)?;
    m.add_function(wrap_pyfunction!(assess_readiness_fixtures, m)?)?;
    Ok(())
}
