//! Report generation: co-occurrence matrices, frequency tables, top n-gram
//! features, and evaluation tables. All renderers are pure functions of
//! their inputs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::detect::CorpusScan;
use crate::error::{Error, Result};
use crate::eval::EvalReport;
use crate::labels::{PurposeLabel, ReasonCategory, ReasonSubcategory};
use crate::pom::LocationCategory;
use crate::record::SatdRecord;
use crate::text::NgramVocabulary;

/// Which two dimensions a co-occurrence matrix relates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoDims {
    LocationReason,
    LocationPurpose,
}

/// Counts of records per (row label, column label) pair, rows and columns
/// in canonical enum order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoMatrix {
    pub row_dim: String,
    pub col_dim: String,
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub counts: Vec<Vec<usize>>,
}

impl CoMatrix {
    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    /// CSV with a trailing per-row percentage breakdown of each column.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.row_dim);
        for col in &self.cols {
            out.push(',');
            out.push_str(col);
        }
        out.push('\n');
        for (row, counts) in self.rows.iter().zip(&self.counts) {
            out.push_str(row);
            for c in counts {
                out.push_str(&format!(",{c}"));
            }
            out.push('\n');
        }
        out.push('\n');
        out.push_str(&format!("{} (row %)", self.row_dim));
        for col in &self.cols {
            out.push(',');
            out.push_str(col);
        }
        out.push('\n');
        for (row, counts) in self.rows.iter().zip(&self.counts) {
            let row_total: usize = counts.iter().sum();
            out.push_str(row);
            for c in counts {
                if row_total == 0 {
                    out.push_str(",0.0");
                } else {
                    out.push_str(&format!(",{:.1}", 100.0 * *c as f64 / row_total as f64));
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Cross-tabulate locations against reasons or purposes. Every record must
/// carry both requested labels.
pub fn co_occurrence(records: &[SatdRecord], dims: CoDims) -> Result<CoMatrix> {
    let rows: Vec<String> = LocationCategory::ALL
        .iter()
        .map(|c| c.name().to_string())
        .collect();
    let cols: Vec<String> = match dims {
        CoDims::LocationReason => ReasonCategory::ALL
            .iter()
            .map(|c| c.name().to_string())
            .collect(),
        CoDims::LocationPurpose => PurposeLabel::ALL
            .iter()
            .map(|p| p.name().to_string())
            .collect(),
    };
    let mut counts = vec![vec![0usize; cols.len()]; rows.len()];
    for record in records {
        let row = LocationCategory::ALL
            .iter()
            .position(|c| *c == record.location)
            .expect("location in canonical set");
        let col = match dims {
            CoDims::LocationReason => {
                let reason = record
                    .reason
                    .as_ref()
                    .ok_or_else(|| Error::MissingLabel(record.id.clone()))?;
                ReasonCategory::ALL
                    .iter()
                    .position(|c| *c == reason.category)
                    .expect("reason in canonical set")
            }
            CoDims::LocationPurpose => {
                let purpose = record
                    .purpose
                    .ok_or_else(|| Error::MissingLabel(record.id.clone()))?;
                PurposeLabel::ALL
                    .iter()
                    .position(|p| *p == purpose)
                    .expect("purpose in canonical set")
            }
        };
        counts[row][col] += 1;
    }
    Ok(CoMatrix {
        row_dim: "Location".to_string(),
        col_dim: match dims {
            CoDims::LocationReason => "Reason".to_string(),
            CoDims::LocationPurpose => "Purpose".to_string(),
        },
        rows,
        cols,
        counts,
    })
}

/// One line of a top-features table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow {
    pub class: String,
    pub ngram: String,
    pub frequency: usize,
}

/// For each class, the `per_class` terms with the highest class document
/// frequency; ties resolve by vocabulary order (length, then lexicographic).
pub fn top_features(vocab: &NgramVocabulary, per_class: usize) -> Vec<FeatureRow> {
    let mut classes: Vec<&String> = vocab
        .terms
        .iter()
        .flat_map(|t| t.class_freq.keys())
        .collect();
    classes.sort();
    classes.dedup();
    let mut rows = Vec::new();
    for class in classes {
        let mut candidates: Vec<(usize, usize)> = vocab
            .terms
            .iter()
            .enumerate()
            .filter_map(|(i, t)| t.class_freq.get(class).map(|df| (i, *df)))
            .collect();
        candidates.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        for (idx, df) in candidates.into_iter().take(per_class) {
            rows.push(FeatureRow {
                class: class.clone(),
                ngram: vocab.terms[idx].ngram.join(" "),
                frequency: df,
            });
        }
    }
    rows
}

/// Render a top-features table (Category | N-gram features | Frequency).
pub fn render_feature_table(rows: &[FeatureRow]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<45} {:<35} {:>9}\n",
        "Category", "N-gram features", "Frequency"
    ));
    let mut last_class = "";
    for row in rows {
        let class = if row.class == last_class { "" } else { &row.class };
        out.push_str(&format!("{:<45} {:<35} {:>9}\n", class, row.ngram, row.frequency));
        last_class = &row.class;
    }
    out
}

/// Display percentage: half-up rounding, with non-zero counts floored at 1%.
pub fn display_percent(count: usize, total: usize) -> u32 {
    if count == 0 || total == 0 {
        return 0;
    }
    let pct = (100.0 * count as f64 / total as f64).round() as u32;
    pct.max(1)
}

/// One row of a frequency table; sub-rows are indented category refinements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyRow {
    pub label: String,
    pub count: usize,
    pub percent: u32,
    pub is_subrow: bool,
}

fn render_frequency_table(title: &str, rows: &[FrequencyRow], loc: Option<&[usize]>) -> String {
    let mut out = String::new();
    match loc {
        Some(_) => out.push_str(&format!("{:<45} {:>16} {:>16}\n", title, "Frequency", "LOC")),
        None => out.push_str(&format!("{:<45} {:>16}\n", title, "Frequency")),
    }
    for (i, row) in rows.iter().enumerate() {
        let label = if row.is_subrow {
            format!("  {}", row.label)
        } else {
            row.label.clone()
        };
        let freq = format!("{} ({}%)", row.count, row.percent);
        match loc {
            Some(locs) => out.push_str(&format!("{:<45} {:>16} {:>16}\n", label, freq, locs[i])),
            None => out.push_str(&format!("{:<45} {:>16}\n", label, freq)),
        }
    }
    out
}

/// Location frequency rows, most frequent first (zero-count categories are
/// kept so the taxonomy stays visible).
pub fn location_frequency(records: &[SatdRecord]) -> Vec<FrequencyRow> {
    let total = records.len();
    let mut rows: Vec<FrequencyRow> = LocationCategory::ALL
        .iter()
        .map(|cat| {
            let count = records.iter().filter(|r| r.location == *cat).count();
            FrequencyRow {
                label: cat.name().to_string(),
                count,
                percent: display_percent(count, total),
                is_subrow: false,
            }
        })
        .collect();
    rows.sort_by_key(|r| std::cmp::Reverse(r.count));
    rows
}

pub fn render_location_table(records: &[SatdRecord], loc_counts: Option<&BTreeMap<LocationCategory, usize>>) -> String {
    let rows = location_frequency(records);
    match loc_counts {
        Some(counts) => {
            let locs: Vec<usize> = rows
                .iter()
                .map(|r| {
                    LocationCategory::ALL
                        .iter()
                        .find(|c| c.name() == r.label)
                        .and_then(|c| counts.get(c).copied())
                        .unwrap_or(0)
                })
                .collect();
            render_frequency_table("Location", &rows, Some(&locs))
        }
        None => render_frequency_table("Location", &rows, None),
    }
}

/// Reason frequency rows: categories (most frequent first) with their
/// subcategory breakdowns.
pub fn reason_frequency(records: &[SatdRecord]) -> Vec<FrequencyRow> {
    let total = records.iter().filter(|r| r.reason.is_some()).count();
    let mut categories: Vec<(ReasonCategory, usize)> = ReasonCategory::ALL
        .iter()
        .map(|cat| {
            let count = records
                .iter()
                .filter(|r| r.reason.as_ref().is_some_and(|l| l.category == *cat))
                .count();
            (*cat, count)
        })
        .collect();
    categories.sort_by_key(|(_, count)| std::cmp::Reverse(*count));
    let mut rows = Vec::new();
    for (cat, count) in categories {
        rows.push(FrequencyRow {
            label: cat.name().to_string(),
            count,
            percent: display_percent(count, total),
            is_subrow: false,
        });
        for sub in ReasonSubcategory::ALL {
            if sub.parent() != cat {
                continue;
            }
            let sub_count = records
                .iter()
                .filter(|r| r.reason.as_ref().is_some_and(|l| l.subcategory == Some(sub)))
                .count();
            if sub_count > 0 {
                rows.push(FrequencyRow {
                    label: sub.name().to_string(),
                    count: sub_count,
                    percent: display_percent(sub_count, total),
                    is_subrow: true,
                });
            }
        }
    }
    rows
}

pub fn purpose_frequency(records: &[SatdRecord]) -> Vec<FrequencyRow> {
    let total = records.iter().filter(|r| r.purpose.is_some()).count();
    let mut rows: Vec<FrequencyRow> = PurposeLabel::ALL
        .iter()
        .map(|p| {
            let count = records.iter().filter(|r| r.purpose == Some(*p)).count();
            FrequencyRow {
                label: p.name().to_string(),
                count,
                percent: display_percent(count, total),
                is_subrow: false,
            }
        })
        .collect();
    rows.sort_by_key(|r| std::cmp::Reverse(r.count));
    rows
}

pub fn render_reason_table(records: &[SatdRecord]) -> String {
    render_frequency_table("Reason", &reason_frequency(records), None)
}

pub fn render_purpose_table(records: &[SatdRecord]) -> String {
    render_frequency_table("Purpose", &purpose_frequency(records), None)
}

/// Dataset summary line (repositories, build files, comments, SATD).
pub fn render_corpus_summary(scan: &CorpusScan) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:>20} {:>12} {:>12} {:>16}\n",
        "# Maven repositories", "# POM files", "# Comments", "# SATD comments"
    ));
    out.push_str(&format!(
        "{:>20} {:>12} {:>12} {:>16}\n",
        scan.n_repos, scan.n_build_files, scan.n_comments, scan.n_satd
    ));
    if !scan.skipped.is_empty() {
        out.push_str(&format!("\nskipped files: {}\n", scan.skipped.len()));
        for issue in &scan.skipped {
            out.push_str(&format!("  {}: {}\n", issue.path, issue.reason));
        }
    }
    out
}

/// Evaluation table: Precision/Recall/F1 per class, one column per
/// algorithm (in the given order), with weighted and macro average rows.
pub fn render_eval_table(reports: &[(String, EvalReport)]) -> String {
    let mut out = String::new();
    let Some((_, first)) = reports.first() else {
        return out;
    };
    out.push_str(&format!("{:<12} {:<48}", "", "Category"));
    for (a, _) in reports {
        out.push_str(&format!(" {:>10}", a));
    }
    out.push('\n');
    type Getter = fn(&crate::eval::ClassMetrics) -> f64;
    type AvgGetter = fn(&crate::eval::MetricsSummary) -> f64;
    let sections: [(&str, Getter, AvgGetter, AvgGetter); 3] = [
        (
            "Precision",
            |c| c.precision,
            |m| m.weighted_precision,
            |m| m.macro_precision,
        ),
        ("Recall", |c| c.recall, |m| m.weighted_recall, |m| m.macro_recall),
        ("F1-score", |c| c.f1, |m| m.weighted_f1, |m| m.macro_f1),
    ];
    for (name, get, weighted, macro_avg) in sections {
        for (i, label) in first.labels.iter().enumerate() {
            let head = if i == 0 { name } else { "" };
            out.push_str(&format!("{:<12} {:<48}", head, label));
            for (_, report) in reports {
                out.push_str(&format!(" {:>10.2}", get(&report.mean.per_class[i])));
            }
            out.push('\n');
        }
        out.push_str(&format!("{:<12} {:<48}", "", "Avg. (weighted)"));
        for (_, report) in reports {
            out.push_str(&format!(" {:>10.2}", weighted(&report.mean)));
        }
        out.push('\n');
        out.push_str(&format!("{:<12} {:<48}", "", "Avg. (macro)"));
        for (_, report) in reports {
            out.push_str(&format!(" {:>10.2}", macro_avg(&report.mean)));
        }
        out.push('\n');
    }
    out
}
