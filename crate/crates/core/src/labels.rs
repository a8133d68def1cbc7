//! Reason and purpose taxonomies for SATD comments, plus the merged label
//! sets used for classification.

use serde::{Deserialize, Serialize};

/// Why the debt exists.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum ReasonCategory {
    #[serde(rename = "Limitation")]
    Limitation,
    #[serde(rename = "Dependency")]
    Dependency,
    #[serde(rename = "Recursive call")]
    RecursiveCall,
    #[serde(rename = "Document")]
    Document,
    #[serde(rename = "Build break")]
    BuildBreak,
    #[serde(rename = "Compiler setting")]
    CompilerSetting,
    #[serde(rename = "Code smell")]
    CodeSmell,
    #[serde(rename = "Change propagation")]
    ChangePropagation,
    #[serde(rename = "No reason")]
    NoReason,
}

impl ReasonCategory {
    pub const ALL: [ReasonCategory; 9] = [
        ReasonCategory::Limitation,
        ReasonCategory::Dependency,
        ReasonCategory::RecursiveCall,
        ReasonCategory::Document,
        ReasonCategory::BuildBreak,
        ReasonCategory::CompilerSetting,
        ReasonCategory::CodeSmell,
        ReasonCategory::ChangePropagation,
        ReasonCategory::NoReason,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ReasonCategory::Limitation => "Limitation",
            ReasonCategory::Dependency => "Dependency",
            ReasonCategory::RecursiveCall => "Recursive call",
            ReasonCategory::Document => "Document",
            ReasonCategory::BuildBreak => "Build break",
            ReasonCategory::CompilerSetting => "Compiler setting",
            ReasonCategory::CodeSmell => "Code smell",
            ReasonCategory::ChangePropagation => "Change propagation",
            ReasonCategory::NoReason => "No reason",
        }
    }
}

/// Named reason subcategories, each nested under one category.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum ReasonSubcategory {
    #[serde(rename = "External library limitation")]
    ExternalLibraryLimitation,
    #[serde(rename = "External tool limitation")]
    ExternalToolLimitation,
    #[serde(rename = "Build tool limitation")]
    BuildToolLimitation,
    #[serde(rename = "Stale dependency")]
    StaleDependency,
    #[serde(rename = "Missing dependency")]
    MissingDependency,
    #[serde(rename = "Dependency conflict")]
    DependencyConflict,
    #[serde(rename = "Post-install dependency resolution")]
    PostInstallDependencyResolution,
    #[serde(rename = "Specify metadata")]
    SpecifyMetadata,
    #[serde(rename = "Licensing")]
    Licensing,
    #[serde(rename = "Compiler configuration")]
    CompilerConfiguration,
    #[serde(rename = "Symbol visibility")]
    SymbolVisibility,
}

impl ReasonSubcategory {
    pub const ALL: [ReasonSubcategory; 11] = [
        ReasonSubcategory::ExternalLibraryLimitation,
        ReasonSubcategory::ExternalToolLimitation,
        ReasonSubcategory::BuildToolLimitation,
        ReasonSubcategory::StaleDependency,
        ReasonSubcategory::MissingDependency,
        ReasonSubcategory::DependencyConflict,
        ReasonSubcategory::PostInstallDependencyResolution,
        ReasonSubcategory::SpecifyMetadata,
        ReasonSubcategory::Licensing,
        ReasonSubcategory::CompilerConfiguration,
        ReasonSubcategory::SymbolVisibility,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ReasonSubcategory::ExternalLibraryLimitation => "External library limitation",
            ReasonSubcategory::ExternalToolLimitation => "External tool limitation",
            ReasonSubcategory::BuildToolLimitation => "Build tool limitation",
            ReasonSubcategory::StaleDependency => "Stale dependency",
            ReasonSubcategory::MissingDependency => "Missing dependency",
            ReasonSubcategory::DependencyConflict => "Dependency conflict",
            ReasonSubcategory::PostInstallDependencyResolution => {
                "Post-install dependency resolution"
            }
            ReasonSubcategory::SpecifyMetadata => "Specify metadata",
            ReasonSubcategory::Licensing => "Licensing",
            ReasonSubcategory::CompilerConfiguration => "Compiler configuration",
            ReasonSubcategory::SymbolVisibility => "Symbol visibility",
        }
    }

    /// The category this subcategory belongs to.
    pub fn parent(&self) -> ReasonCategory {
        use ReasonSubcategory::*;
        match self {
            ExternalLibraryLimitation | ExternalToolLimitation | BuildToolLimitation => {
                ReasonCategory::Limitation
            }
            StaleDependency | MissingDependency | DependencyConflict
            | PostInstallDependencyResolution => ReasonCategory::Dependency,
            SpecifyMetadata | Licensing => ReasonCategory::Document,
            CompilerConfiguration | SymbolVisibility => ReasonCategory::CompilerSetting,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReasonLabel {
    pub category: ReasonCategory,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subcategory: Option<ReasonSubcategory>,
}

impl ReasonLabel {
    pub fn new(category: ReasonCategory) -> Self {
        ReasonLabel {
            category,
            subcategory: None,
        }
    }

    /// A subcategory, when present, must nest under its category.
    pub fn is_consistent(&self) -> bool {
        self.subcategory.is_none_or(|s| s.parent() == self.category)
    }
}

/// What the comment is meant to accomplish.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum PurposeLabel {
    #[serde(rename = "Document for later fix")]
    DocumentForLaterFix,
    #[serde(rename = "Document workaround")]
    DocumentWorkaround,
    #[serde(rename = "Warning for future developers")]
    WarningForFutureDevelopers,
    #[serde(rename = "Document suboptimal implementation choice")]
    DocumentSuboptimalImplementationChoice,
    #[serde(rename = "Placeholder for later extension")]
    PlaceholderForLaterExtension,
    #[serde(rename = "Silence build warnings")]
    SilenceBuildWarnings,
}

impl PurposeLabel {
    pub const ALL: [PurposeLabel; 6] = [
        PurposeLabel::DocumentForLaterFix,
        PurposeLabel::DocumentWorkaround,
        PurposeLabel::WarningForFutureDevelopers,
        PurposeLabel::DocumentSuboptimalImplementationChoice,
        PurposeLabel::PlaceholderForLaterExtension,
        PurposeLabel::SilenceBuildWarnings,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PurposeLabel::DocumentForLaterFix => "Document for later fix",
            PurposeLabel::DocumentWorkaround => "Document workaround",
            PurposeLabel::WarningForFutureDevelopers => "Warning for future developers",
            PurposeLabel::DocumentSuboptimalImplementationChoice => {
                "Document suboptimal implementation choice"
            }
            PurposeLabel::PlaceholderForLaterExtension => "Placeholder for later extension",
            PurposeLabel::SilenceBuildWarnings => "Silence build warnings",
        }
    }
}

/// Which classification task a label or model belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Reason,
    Purpose,
}

/// Reason classes after merging infrequent categories.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum MergedReason {
    #[serde(rename = "Limitation")]
    Limitation,
    #[serde(rename = "Dependency")]
    Dependency,
    #[serde(rename = "Other")]
    Other,
}

impl MergedReason {
    pub const ALL: [MergedReason; 3] = [
        MergedReason::Limitation,
        MergedReason::Dependency,
        MergedReason::Other,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            MergedReason::Limitation => "Limitation",
            MergedReason::Dependency => "Dependency",
            MergedReason::Other => "Other",
        }
    }
}

/// Purpose classes after merging infrequent categories.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum MergedPurpose {
    #[serde(rename = "Document for later fix")]
    DocumentForLaterFix,
    #[serde(rename = "Document workaround")]
    DocumentWorkaround,
    #[serde(rename = "Warning for future developers")]
    WarningForFutureDevelopers,
    #[serde(rename = "Document suboptimal implementation choice")]
    DocumentSuboptimalImplementationChoice,
    #[serde(rename = "Other")]
    Other,
}

impl MergedPurpose {
    pub const ALL: [MergedPurpose; 5] = [
        MergedPurpose::DocumentForLaterFix,
        MergedPurpose::DocumentWorkaround,
        MergedPurpose::WarningForFutureDevelopers,
        MergedPurpose::DocumentSuboptimalImplementationChoice,
        MergedPurpose::Other,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            MergedPurpose::DocumentForLaterFix => "Document for later fix",
            MergedPurpose::DocumentWorkaround => "Document workaround",
            MergedPurpose::WarningForFutureDevelopers => "Warning for future developers",
            MergedPurpose::DocumentSuboptimalImplementationChoice => {
                "Document suboptimal implementation choice"
            }
            MergedPurpose::Other => "Other",
        }
    }
}

/// Either task's full label, for the unified merge entry point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Reason(ReasonLabel),
    Purpose(PurposeLabel),
}

/// Either task's merged label. Ordering follows the enum declaration order
/// and is the fixed tie-break order everywhere.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(untagged)]
pub enum MergedLabel {
    Reason(MergedReason),
    Purpose(MergedPurpose),
}

impl MergedLabel {
    pub fn task(&self) -> Task {
        match self {
            MergedLabel::Reason(_) => Task::Reason,
            MergedLabel::Purpose(_) => Task::Purpose,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MergedLabel::Reason(r) => r.name(),
            MergedLabel::Purpose(p) => p.name(),
        }
    }

    /// The full merged label set for a task, in canonical order.
    pub fn all_for(task: Task) -> Vec<MergedLabel> {
        match task {
            Task::Reason => MergedReason::ALL.iter().copied().map(MergedLabel::Reason).collect(),
            Task::Purpose => MergedPurpose::ALL
                .iter()
                .copied()
                .map(MergedLabel::Purpose)
                .collect(),
        }
    }

    pub fn parse(task: Task, name: &str) -> Option<MergedLabel> {
        MergedLabel::all_for(task).into_iter().find(|l| l.name() == name)
    }
}

/// Collapse infrequent categories into `Other`.
pub fn merge_labels(label: &Label) -> MergedLabel {
    match label {
        Label::Reason(r) => MergedLabel::Reason(merge_reason(r)),
        Label::Purpose(p) => MergedLabel::Purpose(merge_purpose(*p)),
    }
}

pub fn merge_reason(label: &ReasonLabel) -> MergedReason {
    match label.category {
        ReasonCategory::Limitation => MergedReason::Limitation,
        ReasonCategory::Dependency => MergedReason::Dependency,
        _ => MergedReason::Other,
    }
}

pub fn merge_purpose(label: PurposeLabel) -> MergedPurpose {
    match label {
        PurposeLabel::DocumentForLaterFix => MergedPurpose::DocumentForLaterFix,
        PurposeLabel::DocumentWorkaround => MergedPurpose::DocumentWorkaround,
        PurposeLabel::WarningForFutureDevelopers => MergedPurpose::WarningForFutureDevelopers,
        PurposeLabel::DocumentSuboptimalImplementationChoice => {
            MergedPurpose::DocumentSuboptimalImplementationChoice
        }
        PurposeLabel::PlaceholderForLaterExtension | PurposeLabel::SilenceBuildWarnings => {
            MergedPurpose::Other
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infrequent_reasons_become_other() {
        let l = ReasonLabel::new(ReasonCategory::RecursiveCall);
        assert_eq!(merge_reason(&l), MergedReason::Other);
        for cat in [
            ReasonCategory::Document,
            ReasonCategory::BuildBreak,
            ReasonCategory::CompilerSetting,
            ReasonCategory::CodeSmell,
            ReasonCategory::ChangePropagation,
            ReasonCategory::NoReason,
        ] {
            assert_eq!(merge_reason(&ReasonLabel::new(cat)), MergedReason::Other);
        }
    }

    #[test]
    fn frequent_reasons_pass_through() {
        assert_eq!(
            merge_reason(&ReasonLabel::new(ReasonCategory::Limitation)),
            MergedReason::Limitation
        );
        assert_eq!(
            merge_reason(&ReasonLabel::new(ReasonCategory::Dependency)),
            MergedReason::Dependency
        );
    }

    #[test]
    fn infrequent_purposes_become_other() {
        assert_eq!(
            merge_purpose(PurposeLabel::SilenceBuildWarnings),
            MergedPurpose::Other
        );
        assert_eq!(
            merge_purpose(PurposeLabel::PlaceholderForLaterExtension),
            MergedPurpose::Other
        );
    }

    #[test]
    fn merge_is_total_and_surjective() {
        let reasons: std::collections::BTreeSet<MergedReason> = ReasonCategory::ALL
            .iter()
            .map(|c| merge_reason(&ReasonLabel::new(*c)))
            .collect();
        assert_eq!(reasons.len(), MergedReason::ALL.len());
        let purposes: std::collections::BTreeSet<MergedPurpose> =
            PurposeLabel::ALL.iter().map(|p| merge_purpose(*p)).collect();
        assert_eq!(purposes.len(), MergedPurpose::ALL.len());
    }

    #[test]
    fn subcategory_nesting_is_checked() {
        let good = ReasonLabel {
            category: ReasonCategory::Limitation,
            subcategory: Some(ReasonSubcategory::ExternalLibraryLimitation),
        };
        assert!(good.is_consistent());
        let bad = ReasonLabel {
            category: ReasonCategory::Dependency,
            subcategory: Some(ReasonSubcategory::Licensing),
        };
        assert!(!bad.is_consistent());
    }

    #[test]
    fn canonical_names_round_trip_serde() {
        let json = serde_json::to_string(&ReasonCategory::RecursiveCall).unwrap();
        assert_eq!(json, "\"Recursive call\"");
        let back: ReasonCategory = serde_json::from_str(&json).unwrap();
        assert_eq!(back, ReasonCategory::RecursiveCall);
    }
}
