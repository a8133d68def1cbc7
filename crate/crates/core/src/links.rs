//! Hyperlink and issue-key mining from comment text, and link-target typing.

use std::ops::Range;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// URL pattern used for both link mining and the `abstracturl` replacement
/// in text preprocessing.
///
/// Printed form of the original pattern:
/// `https?:\/\/(www\.)?[-a-zA-Z0-9@:._\+~#=#]{2,256}\.[a-z]{2,6}\b([-a-zA-Z0-9@:._\+~#?&\/=]*)}`
/// (as published, with a stray trailing `}` and no `%`); the compiled form
/// below is the cleaned equivalent.
pub const URL_PATTERN: &str =
    r"https?://(www\.)?[-a-zA-Z0-9@:%._+~#=]{2,256}\.[a-z]{2,6}\b([-a-zA-Z0-9@:%_+.~#?&/=]*)";

pub(crate) fn url_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(URL_PATTERN).expect("valid url pattern"))
}

fn github_shorthand_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"[A-Za-z0-9][A-Za-z0-9_.-]*/[A-Za-z0-9][A-Za-z0-9_.-]*#[0-9]+")
            .expect("valid shorthand pattern")
    })
}

fn jira_key_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"[A-Z][A-Z0-9]+-[0-9]+").expect("valid jira pattern"))
}

/// A mined reference: a raw URL, a GitHub issue, or a JIRA issue key.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LinkKind {
    Url { url: String },
    GithubIssue { owner: String, repo: String, number: u64 },
    JiraKey { project: String, number: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkRef {
    #[serde(flatten)]
    pub kind: LinkKind,
    /// The exact matched text.
    pub raw: String,
}

impl LinkRef {
    /// True for references a forge can answer status queries about.
    pub fn is_tracker(&self) -> bool {
        matches!(
            self.kind,
            LinkKind::GithubIssue { .. } | LinkKind::JiraKey { .. }
        )
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            LinkKind::Url { url } => url.clone(),
            LinkKind::GithubIssue { owner, repo, number } => {
                format!("{owner}/{repo}#{number}")
            }
            LinkKind::JiraKey { project, number } => format!("{project}-{number}"),
        }
    }
}

/// Extract links with their byte spans, in order of appearance. Spans never
/// overlap: URLs are taken first, then `owner/repo#N` shorthands in the
/// remaining gaps, then JIRA keys in what is left.
pub fn extract_links_spanned(text: &str) -> Vec<(LinkRef, Range<usize>)> {
    let mut found: Vec<(LinkRef, Range<usize>)> = Vec::new();
    for m in url_regex().find_iter(text) {
        found.push((parse_url_link(m.as_str()), m.range()));
    }
    let gaps = |found: &[(LinkRef, Range<usize>)], text: &str| -> Vec<Range<usize>> {
        let mut spans: Vec<Range<usize>> = found.iter().map(|(_, r)| r.clone()).collect();
        spans.sort_by_key(|r| r.start);
        let mut gaps = Vec::new();
        let mut cursor = 0;
        for s in spans {
            if s.start > cursor {
                gaps.push(cursor..s.start);
            }
            cursor = s.end;
        }
        if cursor < text.len() {
            gaps.push(cursor..text.len());
        }
        gaps
    };
    for gap in gaps(&found, text) {
        let slice = &text[gap.clone()];
        for m in github_shorthand_regex().find_iter(slice) {
            let start = gap.start + m.start();
            let end = gap.start + m.end();
            if !bounded(text, start, end) {
                continue;
            }
            if let Some(link) = parse_shorthand(m.as_str()) {
                found.push((link, start..end));
            }
        }
    }
    for gap in gaps(&found, text) {
        let slice = &text[gap.clone()];
        for m in jira_key_regex().find_iter(slice) {
            let start = gap.start + m.start();
            let end = gap.start + m.end();
            if !bounded(text, start, end) {
                continue;
            }
            if let Some(link) = parse_jira_key(m.as_str()) {
                found.push((link, start..end));
            }
        }
    }
    found.sort_by_key(|(_, r)| r.start);
    found
}

/// Extract links in order of appearance; duplicates are kept.
pub fn extract_links(text: &str) -> Vec<LinkRef> {
    extract_links_spanned(text)
        .into_iter()
        .map(|(l, _)| l)
        .collect()
}

fn bounded(text: &str, start: usize, end: usize) -> bool {
    let left_ok = start == 0
        || !text[..start]
            .chars()
            .next_back()
            .is_some_and(|c| c.is_alphanumeric());
    let right_ok = end == text.len()
        || !text[end..]
            .chars()
            .next()
            .is_some_and(|c| c.is_alphanumeric());
    left_ok && right_ok
}

fn parse_shorthand(raw: &str) -> Option<LinkRef> {
    let (repo_part, num) = raw.rsplit_once('#')?;
    let (owner, repo) = repo_part.split_once('/')?;
    Some(LinkRef {
        kind: LinkKind::GithubIssue {
            owner: owner.to_string(),
            repo: repo.to_string(),
            number: num.parse().ok()?,
        },
        raw: raw.to_string(),
    })
}

fn parse_jira_key(raw: &str) -> Option<LinkRef> {
    let (project, num) = raw.rsplit_once('-')?;
    Some(LinkRef {
        kind: LinkKind::JiraKey {
            project: project.to_string(),
            number: num.parse().ok()?,
        },
        raw: raw.to_string(),
    })
}

/// Split a URL into (host, path), both without scheme or query.
pub(crate) fn host_and_path(url: &str) -> (String, String) {
    let rest = url
        .strip_prefix("https://")
        .or_else(|| url.strip_prefix("http://"))
        .unwrap_or(url);
    let rest = match rest.find(['?', '#']) {
        Some(i) => &rest[..i],
        None => rest,
    };
    match rest.find('/') {
        Some(i) => (rest[..i].to_lowercase(), rest[i..].to_string()),
        None => (rest.to_lowercase(), String::new()),
    }
}

/// Recognize GitHub issue URLs and JIRA browse URLs; anything else stays a
/// plain URL.
fn parse_url_link(raw: &str) -> LinkRef {
    let (host, path) = host_and_path(raw);
    let segs: Vec<&str> = path.split('/').filter(|s| !s.is_empty()).collect();
    if (host == "github.com" || host == "www.github.com") && segs.len() >= 4 && segs[2] == "issues"
    {
        if let Ok(number) = segs[3].trim_end_matches(|c: char| !c.is_ascii_digit()).parse() {
            return LinkRef {
                kind: LinkKind::GithubIssue {
                    owner: segs[0].to_string(),
                    repo: segs[1].to_string(),
                    number,
                },
                raw: raw.to_string(),
            };
        }
    }
    if let Some(i) = segs.iter().position(|s| *s == "browse") {
        if let Some(key) = segs.get(i + 1) {
            if jira_key_regex()
                .find(key)
                .is_some_and(|m| m.start() == 0 && m.end() == key.len())
            {
                if let Some(link) = parse_jira_key(key) {
                    return LinkRef {
                        kind: link.kind,
                        raw: raw.to_string(),
                    };
                }
            }
        }
    }
    LinkRef {
        kind: LinkKind::Url {
            url: raw.to_string(),
        },
        raw: raw.to_string(),
    }
}

/// What a link points at, following the target taxonomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LinkTargetType {
    #[serde(rename = "bug report")]
    BugReport,
    #[serde(rename = "404")]
    NotFound404,
    #[serde(rename = "tutorial or article")]
    TutorialOrArticle,
    #[serde(rename = "Stack Overflow")]
    StackOverflow,
    #[serde(rename = "pull request")]
    PullRequest,
    #[serde(rename = "software homepage")]
    SoftwareHomepage,
    #[serde(rename = "forum thread")]
    ForumThread,
    #[serde(rename = "blog post")]
    BlogPost,
    #[serde(rename = "unknown")]
    Unknown,
}

/// Metadata from probing a link target (live fetch or fixture).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkProbe {
    pub http_status: u16,
    pub final_host: String,
    pub final_path: String,
}

/// Type a link target from probe metadata, by a fixed host/path rule table.
pub fn classify_link_target(link: &LinkRef, probe: Option<&LinkProbe>) -> Result<LinkTargetType> {
    let probe = probe.ok_or_else(|| Error::MissingProbe(link.describe()))?;
    if probe.http_status == 404 || probe.http_status == 410 {
        return Ok(LinkTargetType::NotFound404);
    }
    if link.is_tracker() {
        return Ok(LinkTargetType::BugReport);
    }
    let host = probe.final_host.to_lowercase();
    let path = probe.final_path.to_lowercase();
    let is_github = host == "github.com" || host == "www.github.com";
    if (is_github && path.contains("/issues/"))
        || path.contains("/browse/")
        || host.contains("bugzilla")
        || path.contains("show_bug.cgi")
        || host.starts_with("issues.")
        || host.contains("jira")
    {
        return Ok(LinkTargetType::BugReport);
    }
    if is_github && (path.contains("/pull/") || path.contains("/pulls/")) {
        return Ok(LinkTargetType::PullRequest);
    }
    if host == "stackoverflow.com"
        || host.ends_with(".stackoverflow.com")
        || host.ends_with(".stackexchange.com")
    {
        return Ok(LinkTargetType::StackOverflow);
    }
    if host.contains("forum")
        || host.contains("discuss")
        || host.starts_with("groups.")
        || host.starts_with("lists.")
        || path.contains("/forum")
        || path.contains("/thread")
    {
        return Ok(LinkTargetType::ForumThread);
    }
    if host.contains("blog") || path.contains("/blog/") {
        return Ok(LinkTargetType::BlogPost);
    }
    if host.starts_with("wiki.")
        || host.starts_with("docs.")
        || path.contains("/wiki")
        || path.contains("/doc")
        || path.contains("/tutorial")
        || path.contains("/guide")
        || path.contains("/article")
        || path.contains("/manual")
    {
        return Ok(LinkTargetType::TutorialOrArticle);
    }
    let depth = path.split('/').filter(|s| !s.is_empty()).count();
    if depth == 0 {
        return Ok(LinkTargetType::SoftwareHomepage);
    }
    Ok(LinkTargetType::Unknown)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn github_issue_url_is_structured() {
        let links = extract_links("workaround https://github.com/eclipse/xtext/issues/1231");
        assert_eq!(links.len(), 1);
        assert_eq!(
            links[0].kind,
            LinkKind::GithubIssue {
                owner: "eclipse".into(),
                repo: "xtext".into(),
                number: 1231
            }
        );
    }

    #[test]
    fn bare_jira_key_is_found() {
        let links =
            extract_links("Java 9 workaround for missing bval-jsr dependency declaration BVAL-155");
        assert_eq!(links.len(), 1);
        assert_eq!(
            links[0].kind,
            LinkKind::JiraKey {
                project: "BVAL".into(),
                number: 155
            }
        );
    }

    #[test]
    fn no_links_in_plain_text() {
        assert!(extract_links("no links here").is_empty());
    }

    #[test]
    fn shorthand_reference_is_found() {
        let links = extract_links("workaround for eclipse/xtext#1231 (see notes)");
        assert_eq!(links.len(), 1);
        assert_eq!(
            links[0].kind,
            LinkKind::GithubIssue {
                owner: "eclipse".into(),
                repo: "xtext".into(),
                number: 1231
            }
        );
        assert_eq!(links[0].raw, "eclipse/xtext#1231");
    }

    #[test]
    fn jira_browse_url_is_structured() {
        let links = extract_links("see https://issues.apache.org/jira/browse/MJARSIGNER-53 now");
        assert_eq!(links.len(), 1);
        assert_eq!(
            links[0].kind,
            LinkKind::JiraKey {
                project: "MJARSIGNER".into(),
                number: 53
            }
        );
        assert!(links[0].raw.starts_with("https://"));
    }

    #[test]
    fn duplicates_and_order_are_preserved() {
        let text = "fix BVAL-155 then https://github.com/a/b/issues/2 then BVAL-155";
        let links = extract_links(text);
        assert_eq!(links.len(), 3);
        assert_eq!(links[0].raw, "BVAL-155");
        assert!(matches!(links[1].kind, LinkKind::GithubIssue { .. }));
        assert_eq!(links[2].raw, "BVAL-155");
    }

    #[test]
    fn keys_inside_words_are_not_links() {
        assert!(extract_links("see ABC-123x for details").is_empty());
        assert!(extract_links("xABC-123").is_empty());
    }

    #[test]
    fn spans_reconstruct_the_input() {
        let text = "a https://x.org/y b eclipse/xtext#1 c BVAL-2 d";
        let spanned = extract_links_spanned(text);
        let mut rebuilt = String::new();
        let mut cursor = 0;
        for (link, span) in &spanned {
            assert!(span.start >= cursor, "overlapping spans");
            rebuilt.push_str(&text[cursor..span.start]);
            rebuilt.push_str(&link.raw);
            cursor = span.end;
        }
        rebuilt.push_str(&text[cursor..]);
        assert_eq!(rebuilt, text);
    }

    fn probe(status: u16, host: &str, path: &str) -> LinkProbe {
        LinkProbe {
            http_status: status,
            final_host: host.into(),
            final_path: path.into(),
        }
    }

    fn url(raw: &str) -> LinkRef {
        LinkRef {
            kind: LinkKind::Url { url: raw.into() },
            raw: raw.into(),
        }
    }

    #[test]
    fn jira_browse_probe_is_bug_report() {
        let t = classify_link_target(
            &url("https://issues.apache.org/jira/browse/MJARSIGNER-53"),
            Some(&probe(200, "issues.apache.org", "/jira/browse/MJARSIGNER-53")),
        )
        .unwrap();
        assert_eq!(t, LinkTargetType::BugReport);
    }

    #[test]
    fn status_404_beats_everything() {
        let t = classify_link_target(
            &url("https://github.com/a/b/issues/1"),
            Some(&probe(404, "github.com", "/a/b/issues/1")),
        )
        .unwrap();
        assert_eq!(t, LinkTargetType::NotFound404);
    }

    #[test]
    fn stackoverflow_probe() {
        let t = classify_link_target(
            &url("https://stackoverflow.com/questions/123"),
            Some(&probe(200, "stackoverflow.com", "/questions/123")),
        )
        .unwrap();
        assert_eq!(t, LinkTargetType::StackOverflow);
    }

    #[test]
    fn pull_request_probe() {
        let t = classify_link_target(
            &url("https://github.com/a/b/pull/4"),
            Some(&probe(200, "github.com", "/a/b/pull/4")),
        )
        .unwrap();
        assert_eq!(t, LinkTargetType::PullRequest);
    }

    #[test]
    fn homepage_and_unknown() {
        let home = classify_link_target(&url("https://maven.apache.org"), Some(&probe(200, "maven.apache.org", "")))
            .unwrap();
        assert_eq!(home, LinkTargetType::SoftwareHomepage);
        let unk = classify_link_target(
            &url("https://example.com/x/y"),
            Some(&probe(200, "example.com", "/x/y")),
        )
        .unwrap();
        assert_eq!(unk, LinkTargetType::Unknown);
    }

    #[test]
    fn missing_probe_is_an_error() {
        match classify_link_target(&url("https://example.com"), None) {
            Err(Error::MissingProbe(_)) => {}
            other => panic!("expected MissingProbe, got {other:?}"),
        }
    }
}
