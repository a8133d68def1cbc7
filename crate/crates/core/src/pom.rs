//! Maven build file discovery, comment extraction, and location mapping.
//!
//! Comments are the content appearing between `<!--` and `-->` tokens of a
//! well-formed XML document. Each extracted comment carries its structural
//! context: the path of enclosing elements and the element that immediately
//! follows it (comments conventionally precede the code they annotate).

use std::collections::HashMap;
use std::path::Path;

use quick_xml::events::Event;
use quick_xml::Reader;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use walkdir::WalkDir;

use crate::error::{Error, Result};

/// One build specification file found under a scan root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildFile {
    /// Directory that contains the build file, relative to the scan root
    /// (`"."` for the root itself). Any directory holding at least one
    /// matching build file counts as a repository.
    pub repo_id: String,
    /// Path relative to the scan root, with `/` separators.
    pub rel_path: String,
    /// SHA-256 of the raw file bytes, hex encoded.
    pub content_hash: String,
    /// Number of non-blank lines.
    pub total_loc: usize,
}

/// One XML comment with its structural context.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildComment {
    pub file: BuildFile,
    /// Exactly the characters between the comment delimiters.
    pub text: String,
    /// 1-based line of the `<!--` token.
    pub line_start: usize,
    /// 1-based line of the `-->` token end.
    pub line_end: usize,
    /// Element tag names from the document root down to the element whose
    /// content contains the comment. Empty for comments outside the root.
    pub enclosing_path: Vec<String>,
    /// Tag of the element immediately following the comment under the same
    /// parent, if any.
    pub annotated_sibling: Option<String>,
}

/// The nine build-file regions susceptible to SATD, plus a fallback for
/// comments that sit under no recognized tag.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum LocationCategory {
    #[serde(rename = "Plugin configuration")]
    PluginConfiguration,
    #[serde(rename = "External dependencies configuration")]
    ExternalDependenciesConfiguration,
    #[serde(rename = "Build variables")]
    BuildVariables,
    #[serde(rename = "Multi-directory configuration")]
    MultiDirectoryConfiguration,
    #[serde(rename = "Resource configuration")]
    ResourceConfiguration,
    #[serde(rename = "Repository configuration")]
    RepositoryConfiguration,
    #[serde(rename = "Project metadata")]
    ProjectMetadata,
    #[serde(rename = "Build organization")]
    BuildOrganization,
    #[serde(rename = "Software configuration management")]
    SoftwareConfigurationManagement,
    #[serde(rename = "Unclassified")]
    Unclassified,
}

impl LocationCategory {
    /// All variants in canonical order.
    pub const ALL: [LocationCategory; 10] = [
        LocationCategory::PluginConfiguration,
        LocationCategory::ExternalDependenciesConfiguration,
        LocationCategory::BuildVariables,
        LocationCategory::MultiDirectoryConfiguration,
        LocationCategory::ResourceConfiguration,
        LocationCategory::RepositoryConfiguration,
        LocationCategory::ProjectMetadata,
        LocationCategory::BuildOrganization,
        LocationCategory::SoftwareConfigurationManagement,
        LocationCategory::Unclassified,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            LocationCategory::PluginConfiguration => "Plugin configuration",
            LocationCategory::ExternalDependenciesConfiguration => {
                "External dependencies configuration"
            }
            LocationCategory::BuildVariables => "Build variables",
            LocationCategory::MultiDirectoryConfiguration => "Multi-directory configuration",
            LocationCategory::ResourceConfiguration => "Resource configuration",
            LocationCategory::RepositoryConfiguration => "Repository configuration",
            LocationCategory::ProjectMetadata => "Project metadata",
            LocationCategory::BuildOrganization => "Build organization",
            LocationCategory::SoftwareConfigurationManagement => {
                "Software configuration management"
            }
            LocationCategory::Unclassified => "Unclassified",
        }
    }
}

/// A file or subtree that could not be processed; scans record these and
/// continue.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanIssue {
    pub path: String,
    pub reason: String,
}

/// Default build file name.
pub const DEFAULT_PATTERN: &str = "pom.xml";

/// Walk `root` recursively and return every file whose name equals `pattern`,
/// in lexicographic order of their relative paths. Unreadable subtrees and
/// files are recorded as issues; the walk continues.
pub fn discover_build_files(
    root: &Path,
    pattern: &str,
) -> Result<(Vec<BuildFile>, Vec<ScanIssue>)> {
    if !root.is_dir() {
        return Err(Error::RootNotFound(root.to_path_buf()));
    }
    let mut files = Vec::new();
    let mut issues = Vec::new();
    for entry in WalkDir::new(root).follow_links(false) {
        let entry = match entry {
            Ok(e) => e,
            Err(e) => {
                let path = e
                    .path()
                    .map(|p| p.display().to_string())
                    .unwrap_or_else(|| root.display().to_string());
                issues.push(ScanIssue {
                    path,
                    reason: e.to_string(),
                });
                continue;
            }
        };
        if !entry.file_type().is_file() || entry.file_name().to_string_lossy() != pattern {
            continue;
        }
        let rel = entry
            .path()
            .strip_prefix(root)
            .unwrap_or(entry.path())
            .to_string_lossy()
            .replace(std::path::MAIN_SEPARATOR, "/");
        match std::fs::read(entry.path()) {
            Ok(bytes) => {
                let content = String::from_utf8_lossy(&bytes);
                let repo_id = match rel.rfind('/') {
                    Some(i) => rel[..i].to_string(),
                    None => ".".to_string(),
                };
                files.push(BuildFile {
                    repo_id,
                    rel_path: rel,
                    content_hash: hex::encode(Sha256::digest(&bytes)),
                    total_loc: count_non_blank_lines(&content),
                });
            }
            Err(e) => issues.push(ScanIssue {
                path: rel,
                reason: e.to_string(),
            }),
        }
    }
    files.sort_by(|a, b| a.rel_path.cmp(&b.rel_path));
    Ok((files, issues))
}

/// LOC rule used throughout: non-blank lines.
pub fn count_non_blank_lines(content: &str) -> usize {
    content.lines().filter(|l| !l.trim().is_empty()).count()
}

/// Extract every comment of `content` in document order.
pub fn extract_comments(file: &BuildFile, content: &str) -> Result<Vec<BuildComment>> {
    let doc = parse_document(content)?;
    Ok(doc
        .comments
        .into_iter()
        .map(|c| BuildComment {
            file: file.clone(),
            text: c.text,
            line_start: c.line_start,
            line_end: c.line_end,
            enclosing_path: c.enclosing_path,
            annotated_sibling: c.annotated_sibling,
        })
        .collect())
}

/// Map a comment to its build-file location.
///
/// The enclosing path is scanned from the deepest element up, then the
/// annotated sibling is consulted; the first recognized tag decides. `build`
/// is a weak match: it only wins when nothing deeper (including the sibling)
/// is recognized.
pub fn classify_location(comment: &BuildComment) -> LocationCategory {
    classify_tags(
        &comment.enclosing_path,
        comment.annotated_sibling.as_deref(),
    )
}

fn classify_tags(path: &[String], sibling: Option<&str>) -> LocationCategory {
    let mut weak_hit = None;
    for tag in path.iter().rev() {
        match lookup_tag(local_name(tag)) {
            Some(TagMatch::Strong(cat)) => return cat,
            Some(TagMatch::Weak(cat)) => {
                weak_hit.get_or_insert(cat);
            }
            None => {}
        }
    }
    if let Some(tag) = sibling {
        match lookup_tag(local_name(tag)) {
            Some(TagMatch::Strong(cat)) | Some(TagMatch::Weak(cat)) => return cat,
            None => {}
        }
    }
    weak_hit.unwrap_or(LocationCategory::Unclassified)
}

enum TagMatch {
    Strong(LocationCategory),
    /// Matches only when no deeper tag (or the sibling) is recognized.
    Weak(LocationCategory),
}

fn lookup_tag(tag: &str) -> Option<TagMatch> {
    use LocationCategory::*;
    let strong = |c| Some(TagMatch::Strong(c));
    match tag {
        "plugins" | "plugin" | "profiles" | "pluginManagement" => strong(PluginConfiguration),
        "dependencies" | "dependency" | "dependencyManagement" | "exclusions" => {
            strong(ExternalDependenciesConfiguration)
        }
        "properties" => strong(BuildVariables),
        "parent" => strong(MultiDirectoryConfiguration),
        "resources" | "resource" | "testResources" => strong(ResourceConfiguration),
        "repositories" | "repository" | "pluginRepositories" | "distributionManagement" => {
            strong(RepositoryConfiguration)
        }
        "artifactId" | "groupId" | "version" | "url" | "name" | "description" | "licenses" => {
            strong(ProjectMetadata)
        }
        "packaging" => strong(BuildOrganization),
        "build" => Some(TagMatch::Weak(BuildOrganization)),
        "scm" => strong(SoftwareConfigurationManagement),
        _ => None,
    }
}

fn local_name(tag: &str) -> &str {
    match tag.rfind(':') {
        Some(i) => &tag[i + 1..],
        None => tag,
    }
}

/// Count, per location category, the non-blank source lines spanned by
/// elements mapping to that category. When element spans nest, the deepest
/// categorized element owns the line, so no line is counted twice.
pub fn measure_location_loc(content: &str) -> Result<HashMap<LocationCategory, usize>> {
    let doc = parse_document(content)?;
    let n_lines = content.lines().count();
    let mut best: Vec<Option<(usize, LocationCategory)>> = vec![None; n_lines + 1];
    for span in &doc.elements {
        let Some(cat) = span.category else { continue };
        let end = span.end_line.min(n_lines);
        for slot in best[span.start_line..=end].iter_mut() {
            let deeper = match slot {
                Some((depth, _)) => span.depth > *depth,
                None => true,
            };
            if deeper {
                *slot = Some((span.depth, cat));
            }
        }
    }
    let mut counts: HashMap<LocationCategory, usize> =
        LocationCategory::ALL.iter().map(|c| (*c, 0)).collect();
    for (idx, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        if let Some((_, cat)) = best[idx + 1] {
            *counts.get_mut(&cat).unwrap() += 1;
        }
    }
    Ok(counts)
}

struct RawComment {
    text: String,
    line_start: usize,
    line_end: usize,
    enclosing_path: Vec<String>,
    annotated_sibling: Option<String>,
}

struct ElementSpan {
    depth: usize,
    start_line: usize,
    end_line: usize,
    category: Option<LocationCategory>,
}

struct ParsedDoc {
    comments: Vec<RawComment>,
    elements: Vec<ElementSpan>,
}

/// Single-pass event walk collecting comments (with sibling resolution) and
/// element line spans (with their own location classification).
fn parse_document(content: &str) -> Result<ParsedDoc> {
    let lines = LineIndex::new(content);
    let mut reader = Reader::from_str(content);
    reader.config_mut().expand_empty_elements = true;

    let mut stack: Vec<String> = Vec::new();
    // Start line of each open element, parallel to `stack`.
    let mut open_lines: Vec<usize> = Vec::new();
    let mut comments: Vec<RawComment> = Vec::new();
    // Comment indices waiting for the next sibling element, keyed by depth.
    let mut pending: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut elements: Vec<ElementSpan> = Vec::new();

    loop {
        let event = match reader.read_event() {
            Ok(ev) => ev,
            Err(e) => {
                let (line, column) = lines.line_col(reader.error_position() as usize);
                return Err(Error::Parse {
                    line,
                    column,
                    message: e.to_string(),
                });
            }
        };
        let end_pos = reader.buffer_position() as usize;
        match event {
            Event::Start(e) => {
                let name = String::from_utf8_lossy(e.name().as_ref()).into_owned();
                let depth = stack.len();
                if let Some(waiting) = pending.remove(&depth) {
                    for idx in waiting {
                        comments[idx].annotated_sibling = Some(name.clone());
                    }
                }
                let raw_len = e.len() + 2;
                let start_line = lines.line_of(end_pos.saturating_sub(raw_len));
                stack.push(name);
                open_lines.push(start_line);
            }
            Event::End(_) => {
                if let Some(waiting) = pending.remove(&stack.len()) {
                    for idx in waiting {
                        comments[idx].annotated_sibling = None;
                    }
                }
                let name = stack.pop().expect("end event without open element");
                let start_line = open_lines.pop().expect("line stack in sync");
                let end_line = lines.line_of(end_pos.saturating_sub(1));
                let mut path: Vec<&String> = stack.iter().collect();
                path.push(&name);
                let owned: Vec<String> = path.into_iter().cloned().collect();
                let category = match classify_tags(&owned, None) {
                    LocationCategory::Unclassified => None,
                    cat => Some(cat),
                };
                elements.push(ElementSpan {
                    depth: stack.len() + 1,
                    start_line,
                    end_line,
                    category,
                });
            }
            Event::Comment(t) => {
                let raw: &[u8] = &t;
                let text = String::from_utf8_lossy(raw).into_owned();
                let inner_len = raw.len();
                let start_byte = end_pos.saturating_sub(inner_len + 7);
                let line_start = lines.line_of(start_byte);
                let line_end = lines.line_of(end_pos.saturating_sub(1));
                let depth = stack.len();
                let idx = comments.len();
                comments.push(RawComment {
                    text,
                    line_start,
                    line_end,
                    enclosing_path: stack.clone(),
                    annotated_sibling: None,
                });
                pending.entry(depth).or_default().push(idx);
            }
            Event::Eof => {
                if !stack.is_empty() {
                    let (line, column) = lines.line_col(end_pos);
                    return Err(Error::Parse {
                        line,
                        column,
                        message: format!("unexpected end of file: <{}> not closed", stack[0]),
                    });
                }
                break;
            }
            _ => {}
        }
    }
    // Anything still pending has no following element.
    for waiting in pending.into_values() {
        for idx in waiting {
            comments[idx].annotated_sibling = None;
        }
    }
    Ok(ParsedDoc { comments, elements })
}

/// Byte offset to 1-based line/column mapping.
struct LineIndex {
    line_starts: Vec<usize>,
}

impl LineIndex {
    fn new(content: &str) -> Self {
        let mut line_starts = vec![0];
        for (i, b) in content.bytes().enumerate() {
            if b == b'\n' {
                line_starts.push(i + 1);
            }
        }
        LineIndex { line_starts }
    }

    fn line_of(&self, byte: usize) -> usize {
        match self.line_starts.binary_search(&byte) {
            Ok(i) => i + 1,
            Err(i) => i,
        }
    }

    fn line_col(&self, byte: usize) -> (usize, usize) {
        let line = self.line_of(byte);
        let col = byte - self.line_starts[line - 1] + 1;
        (line, col)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_file() -> BuildFile {
        BuildFile {
            repo_id: ".".into(),
            rel_path: "pom.xml".into(),
            content_hash: String::new(),
            total_loc: 0,
        }
    }

    #[test]
    fn single_comment_document() {
        let content = "<project><!-- TODO x --><dependencies/></project>";
        let comments = extract_comments(&test_file(), content).unwrap();
        assert_eq!(comments.len(), 1);
        let c = &comments[0];
        assert_eq!(c.text, " TODO x ");
        assert_eq!(c.enclosing_path, vec!["project"]);
        assert_eq!(c.annotated_sibling.as_deref(), Some("dependencies"));
        assert_eq!(c.line_start, 1);
        assert_eq!(c.line_end, 1);
    }

    #[test]
    fn comment_before_dependency_element() {
        let content = "<project>\n  <dependencies>\n    <!-- stale -->\n    <dependency>\n      <artifactId>x</artifactId>\n    </dependency>\n  </dependencies>\n</project>\n";
        let comments = extract_comments(&test_file(), content).unwrap();
        assert_eq!(comments.len(), 1);
        let c = &comments[0];
        assert_eq!(c.enclosing_path, vec!["project", "dependencies"]);
        assert_eq!(c.annotated_sibling.as_deref(), Some("dependency"));
        assert_eq!(c.line_start, 3);
        assert_eq!(c.line_end, 3);
    }

    #[test]
    fn unclosed_document_is_a_parse_error() {
        let err = extract_comments(&test_file(), "<project><dep>").unwrap_err();
        match err {
            Error::Parse { .. } => {}
            other => panic!("expected Parse, got {other:?}"),
        }
    }

    #[test]
    fn multiline_comment_spans_lines() {
        let content = "<project>\n<!-- line one\nline two -->\n</project>\n";
        let comments = extract_comments(&test_file(), content).unwrap();
        assert_eq!(comments[0].line_start, 2);
        assert_eq!(comments[0].line_end, 3);
        assert_eq!(comments[0].text, " line one\nline two ");
    }

    #[test]
    fn prolog_comment_has_empty_path() {
        let content = "<?xml version=\"1.0\"?>\n<!-- header -->\n<project/>\n";
        let comments = extract_comments(&test_file(), content).unwrap();
        assert_eq!(comments.len(), 1);
        assert!(comments[0].enclosing_path.is_empty());
        assert_eq!(comments[0].annotated_sibling.as_deref(), Some("project"));
    }

    #[test]
    fn trailing_comment_has_no_sibling() {
        let content = "<project><dependencies/><!-- tail --></project>";
        let comments = extract_comments(&test_file(), content).unwrap();
        assert_eq!(comments[0].annotated_sibling, None);
        assert_eq!(comments[0].enclosing_path, vec!["project"]);
    }

    #[test]
    fn cdata_comment_tokens_are_opaque() {
        let content = "<project><a><![CDATA[ <!-- not a comment --> ]]></a><!-- real --></project>";
        let comments = extract_comments(&test_file(), content).unwrap();
        assert_eq!(comments.len(), 1);
        assert_eq!(comments[0].text, " real ");
    }

    #[test]
    fn commented_out_xml_stays_opaque() {
        let content = "<project><!--<dependencyManagement>\n<dependencies/>\n</dependencyManagement>--></project>";
        let comments = extract_comments(&test_file(), content).unwrap();
        assert_eq!(comments.len(), 1);
        assert!(comments[0].text.contains("<dependencyManagement>"));
    }

    #[test]
    fn extraction_is_stable() {
        let content = "<project>\n  <!-- a -->\n  <build>\n    <plugins>\n      <!-- b -->\n      <plugin/>\n    </plugins>\n  </build>\n</project>\n";
        let a = extract_comments(&test_file(), content).unwrap();
        let b = extract_comments(&test_file(), content).unwrap();
        assert_eq!(a, b);
    }

    fn comment_with(path: &[&str], sibling: Option<&str>) -> BuildComment {
        BuildComment {
            file: test_file(),
            text: String::new(),
            line_start: 1,
            line_end: 1,
            enclosing_path: path.iter().map(|s| s.to_string()).collect(),
            annotated_sibling: sibling.map(String::from),
        }
    }

    #[test]
    fn classify_deep_plugin_path() {
        let c = comment_with(&["project", "build", "plugins", "plugin", "executions"], None);
        assert_eq!(classify_location(&c), LocationCategory::PluginConfiguration);
    }

    #[test]
    fn classify_by_sibling() {
        let c = comment_with(&["project", "dependencies"], Some("dependency"));
        assert_eq!(
            classify_location(&c),
            LocationCategory::ExternalDependenciesConfiguration
        );
    }

    #[test]
    fn classify_unrecognized_is_unclassified() {
        let c = comment_with(&["project"], None);
        assert_eq!(classify_location(&c), LocationCategory::Unclassified);
    }

    #[test]
    fn build_tag_yields_only_when_nothing_deeper_matches() {
        let direct = comment_with(&["project", "build"], None);
        assert_eq!(
            classify_location(&direct),
            LocationCategory::BuildOrganization
        );
        // A sibling match outranks the weak `build` ancestor.
        let before_plugins = comment_with(&["project", "build"], Some("plugins"));
        assert_eq!(
            classify_location(&before_plugins),
            LocationCategory::PluginConfiguration
        );
    }

    #[test]
    fn namespace_prefixes_are_stripped_for_lookup() {
        let c = comment_with(&["m:project", "m:dependencies"], None);
        assert_eq!(
            classify_location(&c),
            LocationCategory::ExternalDependenciesConfiguration
        );
    }

    #[test]
    fn loc_for_plugins_block() {
        // <plugins> spans lines 2-6; nothing else maps.
        let content = "<project>\n<plugins>\n<plugin>\n<x>1</x>\n</plugin>\n</plugins>\n</project>\n";
        let counts = measure_location_loc(content).unwrap();
        assert_eq!(counts[&LocationCategory::PluginConfiguration], 5);
        assert_eq!(counts[&LocationCategory::ExternalDependenciesConfiguration], 0);
    }

    #[test]
    fn loc_empty_project_is_zero_everywhere() {
        let counts = measure_location_loc("<project/>").unwrap();
        assert!(counts.values().all(|&v| v == 0));
    }

    #[test]
    fn loc_nested_dependency_management_counts_once() {
        let content = "<project>\n<dependencyManagement>\n<dependencies>\n<dependency>\n<g>a</g>\n</dependency>\n</dependencies>\n</dependencyManagement>\n</project>\n";
        let counts = measure_location_loc(content).unwrap();
        assert_eq!(
            counts[&LocationCategory::ExternalDependenciesConfiguration],
            7
        );
        let total: usize = counts.values().sum();
        assert_eq!(total, 7);
    }

    #[test]
    fn loc_sum_never_exceeds_total() {
        let content = "<project>\n<name>x</name>\n<build>\n<plugins>\n<plugin/>\n</plugins>\n</build>\n\n<other>y</other>\n</project>\n";
        let counts = measure_location_loc(content).unwrap();
        let total: usize = counts.values().sum();
        assert!(total <= count_non_blank_lines(content));
    }

    #[test]
    fn discovery_filters_sorts_and_hashes() {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path();
        std::fs::create_dir_all(root.join("a/b")).unwrap();
        std::fs::create_dir_all(root.join("a/src")).unwrap();
        std::fs::write(root.join("a/pom.xml"), "<project/>\n").unwrap();
        std::fs::write(root.join("a/b/pom.xml"), "<project>\n</project>\n").unwrap();
        std::fs::write(root.join("a/src/Main.java"), "class Main {}\n").unwrap();
        let (files, issues) = discover_build_files(root, "pom.xml").unwrap();
        assert!(issues.is_empty());
        let paths: Vec<&str> = files.iter().map(|f| f.rel_path.as_str()).collect();
        assert_eq!(paths, vec!["a/b/pom.xml", "a/pom.xml"]);
        assert_eq!(files[0].repo_id, "a/b");
        assert_eq!(files[0].total_loc, 2);
        assert_eq!(files[1].total_loc, 1);
        assert_eq!(files[1].content_hash.len(), 64);
    }

    #[test]
    fn discovery_of_empty_directory() {
        let dir = tempfile::tempdir().unwrap();
        let (files, issues) = discover_build_files(dir.path(), "pom.xml").unwrap();
        assert!(files.is_empty());
        assert!(issues.is_empty());
    }

    #[test]
    fn discovery_missing_root_fails() {
        let err = discover_build_files(Path::new("/nonexistent/nowhere"), "pom.xml").unwrap_err();
        matches!(err, Error::RootNotFound(_));
    }

    /// Comment-open delimiters outside CDATA sections, counted directly on
    /// the source text.
    fn count_comment_opens(content: &str) -> usize {
        let bytes = content.as_bytes();
        let mut i = 0;
        let mut count = 0;
        let mut in_cdata = false;
        while i < bytes.len() {
            if in_cdata {
                if bytes[i..].starts_with(b"]]>") {
                    in_cdata = false;
                    i += 3;
                    continue;
                }
            } else if bytes[i..].starts_with(b"<![CDATA[") {
                in_cdata = true;
                i += 9;
                continue;
            } else if bytes[i..].starts_with(b"<!--") {
                count += 1;
                // Skip to the close so delimiters inside comment text are
                // not recounted.
                let rest = &content[i + 4..];
                match rest.find("-->") {
                    Some(j) => {
                        i += 4 + j + 3;
                        continue;
                    }
                    None => break,
                }
            }
            i += 1;
        }
        count
    }

    #[test]
    fn comment_count_conservation() {
        let docs = [
            "<project><!-- a --><!-- b --></project>",
            "<p><![CDATA[<!-- x -->]]><!-- y --></p>",
            "<!-- pre --><p><q><!-- in --></q></p><!-- post -->",
            "<p>text<!--c1-->more<!--c2--></p>",
        ];
        for doc in docs {
            let extracted = extract_comments(&test_file(), doc).unwrap();
            assert_eq!(extracted.len(), count_comment_opens(doc), "doc: {doc}");
        }
    }
}
