//! Ready-to-be-addressed triage: decide whether a SATD comment's referenced
//! issue is already resolved, and draft the remediation write-up.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forge::{fetch_issue_status, fetch_repo_status, github_repo_reference, ForgeClient,
    IssueStatus};
use crate::links::{extract_links, LinkKind, LinkRef};
use crate::record::SatdRecord;

/// Exclusion rules, checked in order before the readiness predicate:
/// (I) the repository referenced in the comment is archived, (II) the
/// referenced issue's repository is archived, (III) a referenced repository
/// is a mirror, (IV) the link is annotated as a cross-reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExclusionRule {
    I,
    II,
    III,
    IV,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome")]
pub enum Outcome {
    Ready,
    OnHold,
    Excluded { rule: ExclusionRule },
    NoActionableLink,
}

impl Outcome {
    pub fn name(&self) -> &'static str {
        match self {
            Outcome::Ready => "Ready",
            Outcome::OnHold => "OnHold",
            Outcome::Excluded { .. } => "Excluded",
            Outcome::NoActionableLink => "NoActionableLink",
        }
    }
}

/// One link's fetched status (or the error fetching it).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub link: LinkRef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub status: Option<IssueStatus>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadinessVerdict {
    #[serde(flatten)]
    pub outcome: Outcome,
    pub evidence: Vec<Evidence>,
}

/// The verdict JSONL line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub schema_version: u32,
    pub record_id: String,
    pub outcome: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<ExclusionRule>,
    pub evidence: Vec<Evidence>,
}

impl VerdictRecord {
    pub fn new(record_id: String, verdict: &ReadinessVerdict) -> Self {
        let rule = match verdict.outcome {
            Outcome::Excluded { rule } => Some(rule),
            _ => None,
        };
        VerdictRecord {
            schema_version: crate::record::SCHEMA_VERSION,
            record_id,
            outcome: verdict.outcome.name().to_string(),
            rule,
            evidence: verdict.evidence.clone(),
        }
    }
}

const RESOLVED_STATES: [&str; 4] = ["resolved", "closed", "verified", "completed"];

fn is_resolved(status: &IssueStatus) -> bool {
    let state_ok = RESOLVED_STATES
        .iter()
        .any(|s| status.state.eq_ignore_ascii_case(s));
    // Only trackers exposing a resolution field (JIRA) are held to
    // resolution == fixed; GitHub has no such field.
    let resolution_ok = status
        .resolution
        .as_deref()
        .is_none_or(|r| r.eq_ignore_ascii_case("fixed"));
    state_ok && resolution_ok
}

/// Decide readiness from collected evidence. Fetch errors never fail the
/// assessment; they degrade the record to OnHold with the error recorded.
pub fn assess_readiness(record: &SatdRecord, evidence: Vec<Evidence>) -> ReadinessVerdict {
    let has_tracker = evidence.iter().any(|e| e.link.is_tracker());
    if !has_tracker {
        return ReadinessVerdict {
            outcome: Outcome::NoActionableLink,
            evidence,
        };
    }
    // Exclusion precedence I -> II -> III -> IV, then the readiness check.
    let rule_i = evidence.iter().any(|e| {
        matches!(e.link.kind, LinkKind::Url { .. })
            && e.status.as_ref().is_some_and(|s| s.repo_archived)
    });
    if rule_i {
        return ReadinessVerdict {
            outcome: Outcome::Excluded {
                rule: ExclusionRule::I,
            },
            evidence,
        };
    }
    let rule_ii = evidence.iter().any(|e| {
        e.link.is_tracker() && e.status.as_ref().is_some_and(|s| s.repo_archived)
    });
    if rule_ii {
        return ReadinessVerdict {
            outcome: Outcome::Excluded {
                rule: ExclusionRule::II,
            },
            evidence,
        };
    }
    let rule_iii = evidence
        .iter()
        .any(|e| e.status.as_ref().is_some_and(|s| s.repo_is_mirror));
    if rule_iii {
        return ReadinessVerdict {
            outcome: Outcome::Excluded {
                rule: ExclusionRule::III,
            },
            evidence,
        };
    }
    if record.cross_reference_flag {
        return ReadinessVerdict {
            outcome: Outcome::Excluded {
                rule: ExclusionRule::IV,
            },
            evidence,
        };
    }
    let ready = evidence.iter().any(|e| {
        e.link.is_tracker() && e.status.as_ref().is_some_and(is_resolved)
    });
    ReadinessVerdict {
        outcome: if ready { Outcome::Ready } else { Outcome::OnHold },
        evidence,
    }
}

/// Gather evidence for a record's links: tracker links are queried for
/// issue status, bare GitHub repository URLs for archived/mirror flags.
/// Other URLs carry no status evidence.
pub fn collect_evidence(record: &SatdRecord, client: &dyn ForgeClient) -> Vec<Evidence> {
    let links = if record.links.is_empty() {
        extract_links(&record.text)
    } else {
        record.links.clone()
    };
    let mut evidence = Vec::new();
    for link in links {
        if link.is_tracker() {
            match fetch_issue_status(&link, client) {
                Ok(status) => evidence.push(Evidence {
                    link,
                    status: Some(status),
                    error: None,
                }),
                Err(e) => evidence.push(Evidence {
                    link,
                    status: None,
                    error: Some(e.to_string()),
                }),
            }
        } else if let LinkKind::Url { url } = &link.kind {
            if let Some((owner, repo)) = github_repo_reference(url) {
                match fetch_repo_status(&owner, &repo, client) {
                    Ok(status) => evidence.push(Evidence {
                        link,
                        status: Some(status),
                        error: None,
                    }),
                    Err(e) => evidence.push(Evidence {
                        link,
                        status: None,
                        error: Some(e.to_string()),
                    }),
                }
            }
        }
    }
    evidence
}

/// Run the full triage over a record set, in input order.
pub fn assess_records(
    records: &[SatdRecord],
    client: &dyn ForgeClient,
) -> Vec<(String, ReadinessVerdict)> {
    records
        .iter()
        .map(|r| {
            let evidence = collect_evidence(r, client);
            (r.id.clone(), assess_readiness(r, evidence))
        })
        .collect()
}

/// Render the remediation write-up for a Ready record: the comment's
/// location and text, each resolved reference with its status, and the
/// suggested action.
pub fn draft_remediation_report(
    record: &SatdRecord,
    verdict: &ReadinessVerdict,
) -> Result<String> {
    if verdict.outcome != Outcome::Ready {
        return Err(Error::NotReady);
    }
    let mut out = String::new();
    out.push_str(&format!(
        "# Ready-to-be-addressed SATD in `{}`\n\n",
        record.path
    ));
    out.push_str(
        "While scanning build specifications for self-admitted technical debt, \
         we found a comment that waits on an external issue which has since been \
         resolved. The related code or comment can likely be removed or fixed.\n\n",
    );
    out.push_str("Comment location:\n\n");
    out.push_str("```\n");
    out.push_str(&format!(
        "{}\nLines {} to {}\n\n",
        record.path, record.line_start, record.line_end
    ));
    for (offset, line) in record.text.trim_matches('\n').lines().enumerate() {
        out.push_str(&format!("{:>4}  {}\n", record.line_start + offset, line));
    }
    out.push_str("```\n\n");
    out.push_str("Resolved reference(s):\n\n");
    for e in &verdict.evidence {
        let Some(status) = &e.status else { continue };
        if !e.link.is_tracker() || !is_resolved(status) {
            continue;
        }
        match &status.resolution {
            Some(resolution) => out.push_str(&format!(
                "- {} — state `{}`, resolution `{}`\n",
                e.link.raw, status.state, resolution
            )),
            None => out.push_str(&format!("- {} — state `{}`\n", e.link.raw, status.state)),
        }
    }
    out.push_str(
        "\nSuggested action: remove the stale comment, and drop the workaround or \
         override it guards if the fixed upstream version is adopted.\n",
    );
    Ok(out)
}
