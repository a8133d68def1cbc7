//! Issue-tracker clients: a fixture client replaying recorded payloads and
//! a live HTTP client for GitHub and JIRA REST.
//!
//! Fixture format: a directory of JSON payloads keyed by normalized request
//! path — strip the leading slash and query string, then replace `/` with
//! `_`. Examples:
//!
//! - `GET /repos/eclipse/xtext/issues/1231` -> `repos_eclipse_xtext_issues_1231.json`
//! - `GET /repos/eclipse/xtext`             -> `repos_eclipse_xtext.json`
//! - `GET /rest/api/2/issue/BVAL-155?fields=status,resolution`
//!   -> `rest_api_2_issue_BVAL-155.json`
//!
//! A payload of `{"__error__": "..."}` simulates a fetch failure;
//! `{"__error__": "rate_limited", "retry_after": N}` simulates throttling.
//! A missing file is a 404.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::links::{host_and_path, LinkKind, LinkRef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Forge {
    #[serde(rename = "github")]
    GitHub,
    #[serde(rename = "jira")]
    Jira,
}

/// Normalized status of a referenced issue (or repository).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IssueStatus {
    pub forge: Forge,
    /// Lowercased state, e.g. "open", "closed", "resolved". For a bare
    /// repository reference this is "repository".
    pub state: String,
    /// Lowercased resolution when the tracker exposes one (JIRA).
    pub resolution: Option<String>,
    pub repo_archived: bool,
    pub repo_is_mirror: bool,
    pub fetched_at: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RepoFlags {
    pub archived: bool,
    pub is_mirror: bool,
}

/// Raw fetch surface; normalization happens in [`fetch_issue_status`].
pub trait ForgeClient {
    fn github_issue_state(&self, owner: &str, repo: &str, number: u64) -> Result<String>;
    fn github_repo_flags(&self, owner: &str, repo: &str) -> Result<RepoFlags>;
    /// Returns (state, resolution).
    fn jira_issue_fields(&self, key: &str) -> Result<(String, Option<String>)>;
    fn fetched_at(&self) -> String;
}

/// Fetch and normalize the status of a tracker link. Plain URLs are not a
/// forge resource.
pub fn fetch_issue_status(link: &LinkRef, client: &dyn ForgeClient) -> Result<IssueStatus> {
    match &link.kind {
        LinkKind::GithubIssue {
            owner,
            repo,
            number,
        } => {
            let state = client.github_issue_state(owner, repo, *number)?;
            let flags = client.github_repo_flags(owner, repo)?;
            Ok(IssueStatus {
                forge: Forge::GitHub,
                state: state.to_lowercase(),
                resolution: None,
                repo_archived: flags.archived,
                repo_is_mirror: flags.is_mirror,
                fetched_at: client.fetched_at(),
            })
        }
        LinkKind::JiraKey { project, number } => {
            let key = format!("{project}-{number}");
            let (state, resolution) = client.jira_issue_fields(&key)?;
            Ok(IssueStatus {
                forge: Forge::Jira,
                state: state.to_lowercase(),
                resolution: resolution.map(|r| r.to_lowercase()),
                repo_archived: false,
                repo_is_mirror: false,
                fetched_at: client.fetched_at(),
            })
        }
        LinkKind::Url { url } => Err(Error::UnsupportedForge(url.clone())),
    }
}

/// Status for a bare GitHub repository reference (used by exclusion rule I).
pub fn fetch_repo_status(
    owner: &str,
    repo: &str,
    client: &dyn ForgeClient,
) -> Result<IssueStatus> {
    let flags = client.github_repo_flags(owner, repo)?;
    Ok(IssueStatus {
        forge: Forge::GitHub,
        state: "repository".to_string(),
        resolution: None,
        repo_archived: flags.archived,
        repo_is_mirror: flags.is_mirror,
        fetched_at: client.fetched_at(),
    })
}

/// If `url` is a bare GitHub repository link, its (owner, repo).
pub fn github_repo_reference(url: &str) -> Option<(String, String)> {
    let (host, path) = host_and_path(url);
    if host != "github.com" && host != "www.github.com" {
        return None;
    }
    let segs: Vec<&str> = path.split('/').filter(|s| !s.is_empty()).collect();
    if segs.len() == 2 {
        Some((segs[0].to_string(), segs[1].to_string()))
    } else {
        None
    }
}

fn normalize_request_path(path: &str) -> String {
    let path = path.split(['?', '#']).next().unwrap_or(path);
    path.trim_start_matches('/').replace('/', "_")
}

/// Replays recorded payloads from a directory, byte-deterministically.
pub struct FixtureClient {
    dir: PathBuf,
}

impl FixtureClient {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        FixtureClient { dir: dir.into() }
    }

    fn load(&self, request_path: &str) -> Result<serde_json::Value> {
        let file = self
            .dir
            .join(format!("{}.json", normalize_request_path(request_path)));
        if !file.exists() {
            return Err(Error::RemoteNotFound(request_path.to_string()));
        }
        let text = std::fs::read_to_string(&file).map_err(|e| Error::io(&file, e))?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        if let Some(err) = value.get("__error__").and_then(|v| v.as_str()) {
            return Err(match err {
                "rate_limited" => Error::RateLimited {
                    retry_after_secs: value
                        .get("retry_after")
                        .and_then(|v| v.as_u64())
                        .unwrap_or(60),
                },
                "not_found" => Error::RemoteNotFound(request_path.to_string()),
                other => Error::Fetch(other.to_string()),
            });
        }
        Ok(value)
    }
}

impl ForgeClient for FixtureClient {
    fn github_issue_state(&self, owner: &str, repo: &str, number: u64) -> Result<String> {
        let value = self.load(&format!("/repos/{owner}/{repo}/issues/{number}"))?;
        value
            .get("state")
            .and_then(|v| v.as_str())
            .map(String::from)
            .ok_or_else(|| Error::Fetch("issue payload missing `state`".into()))
    }

    fn github_repo_flags(&self, owner: &str, repo: &str) -> Result<RepoFlags> {
        let value = self.load(&format!("/repos/{owner}/{repo}"))?;
        Ok(RepoFlags {
            archived: value
                .get("archived")
                .and_then(|v| v.as_bool())
                .unwrap_or(false),
            is_mirror: value
                .get("mirror_url")
                .is_some_and(|v| !v.is_null()),
        })
    }

    fn jira_issue_fields(&self, key: &str) -> Result<(String, Option<String>)> {
        let value = self.load(&format!("/rest/api/2/issue/{key}"))?;
        let fields = value
            .get("fields")
            .ok_or_else(|| Error::Fetch("jira payload missing `fields`".into()))?;
        let state = fields
            .get("status")
            .and_then(|s| s.get("name"))
            .and_then(|v| v.as_str())
            .ok_or_else(|| Error::Fetch("jira payload missing `status.name`".into()))?
            .to_string();
        let resolution = fields
            .get("resolution")
            .and_then(|r| r.get("name"))
            .and_then(|v| v.as_str())
            .map(String::from);
        Ok((state, resolution))
    }

    fn fetched_at(&self) -> String {
        // Fixed timestamp keeps fixture replays byte-deterministic.
        "1970-01-01T00:00:00Z".to_string()
    }
}

/// Live client for the GitHub and JIRA REST APIs. Requests to the same host
/// are serialized; throttled requests back off exponentially before giving
/// up with `RateLimited`.
pub struct HttpForgeClient {
    client: reqwest::blocking::Client,
    host_locks: Mutex<HashMap<String, Arc<Mutex<()>>>>,
    github_token: Option<String>,
    jira_token: Option<String>,
    jira_base: String,
    max_attempts: u32,
}

impl HttpForgeClient {
    /// Tokens come from `GITHUB_TOKEN` / `JIRA_TOKEN`; the JIRA instance
    /// from `JIRA_BASE_URL` (default `https://issues.apache.org/jira`).
    pub fn from_env() -> Result<Self> {
        let client = reqwest::blocking::Client::builder()
            .user_agent("buildsatd")
            .timeout(Duration::from_secs(30))
            .build()
            .map_err(|e| Error::Fetch(e.to_string()))?;
        Ok(HttpForgeClient {
            client,
            host_locks: Mutex::new(HashMap::new()),
            github_token: std::env::var("GITHUB_TOKEN").ok(),
            jira_token: std::env::var("JIRA_TOKEN").ok(),
            jira_base: std::env::var("JIRA_BASE_URL")
                .unwrap_or_else(|_| "https://issues.apache.org/jira".to_string()),
            max_attempts: 4,
        })
    }

    fn host_lock(&self, host: &str) -> Arc<Mutex<()>> {
        let mut locks = self.host_locks.lock().expect("host lock map");
        locks.entry(host.to_string()).or_default().clone()
    }

    fn get_json(&self, url: &str, token: Option<&str>) -> Result<serde_json::Value> {
        let (host, _) = host_and_path(url);
        let lock = self.host_lock(&host);
        let _guard = lock.lock().expect("host serialization lock");
        let mut backoff = 1u64;
        for attempt in 0..self.max_attempts {
            let mut req = self.client.get(url).header("Accept", "application/json");
            if let Some(token) = token {
                req = req.header("Authorization", format!("Bearer {token}"));
            }
            let resp = req.send().map_err(|e| Error::Fetch(e.to_string()))?;
            let status = resp.status();
            if status.as_u16() == 404 || status.as_u16() == 410 {
                return Err(Error::RemoteNotFound(url.to_string()));
            }
            if status.as_u16() == 429 || status.as_u16() == 403 {
                let retry_after = resp
                    .headers()
                    .get("retry-after")
                    .and_then(|v| v.to_str().ok())
                    .and_then(|v| v.parse::<u64>().ok())
                    .unwrap_or(backoff);
                if attempt + 1 == self.max_attempts {
                    return Err(Error::RateLimited {
                        retry_after_secs: retry_after,
                    });
                }
                std::thread::sleep(Duration::from_secs(retry_after));
                backoff *= 2;
                continue;
            }
            if !status.is_success() {
                return Err(Error::Fetch(format!("{url}: HTTP {status}")));
            }
            return resp.json().map_err(|e| Error::Fetch(e.to_string()));
        }
        Err(Error::RateLimited {
            retry_after_secs: backoff,
        })
    }
}

impl ForgeClient for HttpForgeClient {
    fn github_issue_state(&self, owner: &str, repo: &str, number: u64) -> Result<String> {
        let url = format!("https://api.github.com/repos/{owner}/{repo}/issues/{number}");
        let value = self.get_json(&url, self.github_token.as_deref())?;
        value
            .get("state")
            .and_then(|v| v.as_str())
            .map(String::from)
            .ok_or_else(|| Error::Fetch("issue payload missing `state`".into()))
    }

    fn github_repo_flags(&self, owner: &str, repo: &str) -> Result<RepoFlags> {
        let url = format!("https://api.github.com/repos/{owner}/{repo}");
        let value = self.get_json(&url, self.github_token.as_deref())?;
        Ok(RepoFlags {
            archived: value
                .get("archived")
                .and_then(|v| v.as_bool())
                .unwrap_or(false),
            is_mirror: value
                .get("mirror_url")
                .is_some_and(|v| !v.is_null()),
        })
    }

    fn jira_issue_fields(&self, key: &str) -> Result<(String, Option<String>)> {
        let url = format!(
            "{}/rest/api/2/issue/{key}?fields=status,resolution",
            self.jira_base.trim_end_matches('/')
        );
        let value = self.get_json(&url, self.jira_token.as_deref())?;
        let fields = value
            .get("fields")
            .ok_or_else(|| Error::Fetch("jira payload missing `fields`".into()))?;
        let state = fields
            .get("status")
            .and_then(|s| s.get("name"))
            .and_then(|v| v.as_str())
            .ok_or_else(|| Error::Fetch("jira payload missing `status.name`".into()))?
            .to_string();
        let resolution = fields
            .get("resolution")
            .and_then(|r| r.get("name"))
            .and_then(|v| v.as_str())
            .map(String::from);
        Ok((state, resolution))
    }

    fn fetched_at(&self) -> String {
        chrono::Utc::now().to_rfc3339()
    }
}
