//! Command-line entry points composing the pipeline stages via JSONL files.
//!
//! Exit codes: 0 on success, 1 on partial success (some files skipped),
//! 2 on fatal errors or bad usage.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::detect::{self, CorpusScan};
use crate::error::{Error, Result};
use crate::eval::{cross_validate, EvalReport};
use crate::forge::{FixtureClient, ForgeClient, HttpForgeClient};
use crate::labels::{merge_purpose, merge_reason, MergedLabel, Task};
use crate::links::extract_links;
use crate::model::search::{classify_doc, model_search, TrialLog, DEFAULT_N_MAX};
use crate::model::{load_model, save_model, AlgoConfig, Algorithm, Hyperparams, TrainedModel};
use crate::pom::{self, LocationCategory, DEFAULT_PATTERN};
use crate::readiness::{assess_records, draft_remediation_report, Outcome, VerdictRecord};
use crate::record::{
    ingest_coded_corpus, read_comment_jsonl, write_jsonl, CommentRecord, Predicted, Prediction,
    SatdRecord,
};
use crate::report;
use crate::text::{build_tfidf_vocabulary, preprocess, vectorize_mode, FeatureVector, TokenDoc};

#[derive(Parser)]
#[command(
    name = "buildsatd",
    version,
    about = "Mine, classify, and triage self-admitted technical debt in Maven build files"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum TaskArg {
    Reason,
    Purpose,
}

impl From<TaskArg> for Task {
    fn from(t: TaskArg) -> Task {
        match t {
            TaskArg::Reason => Task::Reason,
            TaskArg::Purpose => Task::Purpose,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EvalFormat {
    Md,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Extract all XML comments from build files under a directory tree.
    Scan {
        #[arg(long)]
        root: PathBuf,
        /// Build file name to match.
        #[arg(long, default_value = DEFAULT_PATTERN)]
        pattern: String,
        /// Output comments JSONL.
        #[arg(long)]
        out: PathBuf,
    },
    /// Detect SATD comments by keyword matching.
    Detect {
        /// Scan this directory tree (alternative to --input).
        #[arg(long, conflicts_with = "input")]
        root: Option<PathBuf>,
        /// Read a comments JSONL produced by `scan`.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value = DEFAULT_PATTERN)]
        pattern: String,
        /// Keyword list file (one phrase per line); bundled default if absent.
        #[arg(long)]
        keywords: Option<PathBuf>,
        /// Output SATD records JSONL.
        #[arg(long)]
        out: PathBuf,
    },
    /// Search for the best reason/purpose classifier on a coded corpus.
    Train {
        /// Hand-coded corpus JSONL.
        #[arg(long)]
        coded: PathBuf,
        #[arg(long, value_enum)]
        task: TaskArg,
        /// Search trials.
        #[arg(long, default_value_t = 20)]
        budget: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Maximum n-gram length.
        #[arg(long = "n-max", default_value_t = DEFAULT_N_MAX)]
        n_max: usize,
        /// Output model JSON.
        #[arg(long)]
        model: PathBuf,
        /// Optional search log JSONL.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Evaluate the model search plus NB/SVM/KNN baselines.
    Eval {
        #[arg(long)]
        coded: PathBuf,
        #[arg(long, value_enum)]
        task: TaskArg,
        #[arg(long, default_value_t = 10)]
        rounds: usize,
        #[arg(long = "test-fraction", default_value_t = 0.1)]
        test_fraction: f64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        budget: usize,
        #[arg(long = "n-max", default_value_t = DEFAULT_N_MAX)]
        n_max: usize,
        #[arg(long, value_enum, default_value = "md")]
        format: EvalFormat,
        /// Write the report here as well as stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Label SATD records with a trained model.
    Classify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Triage records whose links point at resolved issues.
    Readiness {
        #[arg(long)]
        input: PathBuf,
        /// Directory of recorded forge payloads (offline mode).
        #[arg(long, conflicts_with = "live")]
        fixtures: Option<PathBuf>,
        /// Query live forges (GITHUB_TOKEN / JIRA_TOKEN / JIRA_BASE_URL).
        #[arg(long)]
        live: bool,
        /// Output verdicts JSONL.
        #[arg(long)]
        out: PathBuf,
        /// Write one remediation draft per Ready record into this directory.
        #[arg(long)]
        drafts: Option<PathBuf>,
    },
    /// Frequency tables, co-occurrence matrices, and top features.
    Report {
        /// Coded corpus JSONL.
        #[arg(long)]
        input: PathBuf,
        #[arg(long = "out-dir")]
        out_dir: PathBuf,
        /// Also measure per-location LOC over build files under this root.
        #[arg(long)]
        root: Option<PathBuf>,
        /// Features listed per class.
        #[arg(long = "per-class", default_value_t = 5)]
        per_class: usize,
        #[arg(long = "n-max", default_value_t = DEFAULT_N_MAX)]
        n_max: usize,
    },
}

/// Run the CLI on explicit arguments; returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap exits 0 for --help/--version, 2 for usage errors.
            let code = if e.exit_code() == 0 { 0 } else { 2 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

/// Run the CLI on the process arguments.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Scan { root, pattern, out } => cmd_scan(&root, &pattern, &out),
        Command::Detect {
            root,
            input,
            pattern,
            keywords,
            out,
        } => cmd_detect(root.as_deref(), input.as_deref(), &pattern, keywords.as_deref(), &out),
        Command::Train {
            coded,
            task,
            budget,
            seed,
            n_max,
            model,
            log,
        } => cmd_train(&coded, task.into(), budget, seed, n_max, &model, log.as_deref()),
        Command::Eval {
            coded,
            task,
            rounds,
            test_fraction,
            seed,
            budget,
            n_max,
            format,
            out,
        } => cmd_eval(
            &coded,
            task.into(),
            rounds,
            test_fraction,
            seed,
            budget,
            n_max,
            format,
            out.as_deref(),
        ),
        Command::Classify { model, input, out } => cmd_classify(&model, &input, &out),
        Command::Readiness {
            input,
            fixtures,
            live,
            out,
            drafts,
        } => cmd_readiness(&input, fixtures.as_deref(), live, &out, drafts.as_deref()),
        Command::Report {
            input,
            out_dir,
            root,
            per_class,
            n_max,
        } => cmd_report(&input, &out_dir, root.as_deref(), per_class, n_max),
    }
}

fn cmd_scan(root: &Path, pattern: &str, out: &Path) -> Result<i32> {
    let (comments, _, n_files, skipped) = detect::scan_comments(root, pattern)?;
    let records: Vec<CommentRecord> = comments
        .iter()
        .map(|c| CommentRecord::from_comment(c, pom::classify_location(c)))
        .collect();
    write_jsonl(out, &records)?;
    println!(
        "scanned {} build files, {} comments -> {}",
        n_files,
        records.len(),
        out.display()
    );
    for issue in &skipped {
        eprintln!("skipped {}: {}", issue.path, issue.reason);
    }
    Ok(if skipped.is_empty() { 0 } else { 1 })
}

fn cmd_detect(
    root: Option<&Path>,
    input: Option<&Path>,
    pattern: &str,
    keywords: Option<&Path>,
    out: &Path,
) -> Result<i32> {
    let ks = detect::load_keyword_set(keywords)?;
    let scan: CorpusScan = match (root, input) {
        (Some(root), None) => detect::scan_corpus(root, pattern, &ks)?,
        (None, Some(input)) => {
            let comments = read_comment_jsonl(input)?;
            scan_from_comment_records(&comments, &ks)
        }
        _ => {
            return Err(Error::Domain(
                "detect needs exactly one of --root or --input".into(),
            ))
        }
    };
    write_jsonl(out, &scan.records)?;
    print!("{}", report::render_corpus_summary(&scan));
    println!("satd records -> {}", out.display());
    Ok(if scan.skipped.is_empty() { 0 } else { 1 })
}

/// Detection over previously scanned comments. Repository and file counts
/// are derived from the distinct paths present in the file.
fn scan_from_comment_records(comments: &[CommentRecord], ks: &detect::KeywordSet) -> CorpusScan {
    let repos: std::collections::HashSet<&str> =
        comments.iter().map(|c| c.repo.as_str()).collect();
    let files: std::collections::HashSet<&str> =
        comments.iter().map(|c| c.path.as_str()).collect();
    let mut records = Vec::new();
    let mut ordinal = 0usize;
    let mut current = "";
    for c in comments {
        if c.path != current {
            current = &c.path;
            ordinal = 0;
        }
        ordinal += 1;
        let detection = detect::detect_satd(&c.text, ks);
        if !detection.is_satd {
            continue;
        }
        records.push(SatdRecord {
            schema_version: crate::record::SCHEMA_VERSION,
            id: format!("{}:{}:{}", c.path, c.line_start, ordinal),
            repo: c.repo.clone(),
            path: c.path.clone(),
            line_start: c.line_start,
            line_end: c.line_end,
            enclosing_path: c.enclosing_path.clone(),
            annotated_sibling: c.annotated_sibling.clone(),
            text: c.text.clone(),
            location: c.location,
            is_satd: detection.is_satd,
            matched: detection.matched,
            reason: None,
            purpose: None,
            predicted: None,
            links: extract_links(&c.text),
            cross_reference_flag: false,
        });
    }
    CorpusScan {
        n_repos: repos.len(),
        n_build_files: files.len(),
        n_comments: comments.len(),
        n_satd: records.len(),
        records,
        skipped: vec![],
    }
}

/// Preprocess coded records into (document, merged label) training pairs for
/// one task; records without that task's label are skipped.
fn task_data(records: &[SatdRecord], task: Task) -> Result<Vec<(TokenDoc, MergedLabel)>> {
    let mut data = Vec::new();
    for r in records {
        let label = match task {
            Task::Reason => r.reason.as_ref().map(|l| MergedLabel::Reason(merge_reason(l))),
            Task::Purpose => r.purpose.map(|p| MergedLabel::Purpose(merge_purpose(p))),
        };
        let Some(label) = label else { continue };
        let mut doc = preprocess(&r.text);
        doc.source_id = r.id.clone();
        data.push((doc, label));
    }
    if data.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    Ok(data)
}

fn cmd_train(
    coded: &Path,
    task: Task,
    budget: usize,
    seed: u64,
    n_max: usize,
    model_path: &Path,
    log_path: Option<&Path>,
) -> Result<i32> {
    let records = ingest_coded_corpus(coded)?;
    let data = task_data(&records, task)?;
    let (model, log) = model_search(&data, n_max, budget, seed)?;
    save_model(&model, model_path)?;
    if let Some(log_path) = log_path {
        write_jsonl(log_path, &log)?;
    }
    let best = log
        .iter()
        .filter_map(|t| t.weighted_f1)
        .fold(f64::NEG_INFINITY, f64::max);
    println!(
        "trained {} ({}) on {} records, inner weighted F1 {:.4} -> {}",
        model.algorithm.name(),
        model
            .feature_mode
            .map(|m| m.name())
            .unwrap_or("unknown"),
        data.len(),
        best,
        model_path.display()
    );
    Ok(0)
}

#[derive(serde::Serialize)]
struct EvalOutput {
    schema_version: u32,
    task: Task,
    rounds: usize,
    test_fraction: f64,
    seed: u64,
    reports: Vec<(String, EvalReport)>,
    search_log: Vec<TrialLog>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_eval(
    coded: &Path,
    task: Task,
    rounds: usize,
    test_fraction: f64,
    seed: u64,
    budget: usize,
    n_max: usize,
    format: EvalFormat,
    out: Option<&Path>,
) -> Result<i32> {
    let records = ingest_coded_corpus(coded)?;
    let data = task_data(&records, task)?;
    let docs: Vec<TokenDoc> = data.iter().map(|(d, _)| d.clone()).collect();

    // The searched model evaluates on its own feature space.
    let (best, search_log) = model_search(&data, n_max, budget, seed)?;
    let vocab = best.vocabulary.as_ref().expect("search attaches vocabulary");
    let search_vectors: Vec<(FeatureVector, MergedLabel)> = data
        .iter()
        .map(|(d, l)| (vectorize_mode(d, vocab, best.algorithm.value_mode()), *l))
        .collect();
    let search_cfg = AlgoConfig {
        algorithm: best.algorithm,
        hyperparams: best.hyperparams.clone(),
    };
    let mut reports: Vec<(String, EvalReport)> = vec![(
        "search".to_string(),
        cross_validate(&search_cfg, &search_vectors, rounds, test_fraction, seed)?,
    )];

    // Baselines use classic TF-IDF features.
    let tfidf = build_tfidf_vocabulary(&docs)?;
    for algorithm in [Algorithm::NaiveBayes, Algorithm::Svm, Algorithm::Knn] {
        let vectors: Vec<(FeatureVector, MergedLabel)> = data
            .iter()
            .map(|(d, l)| (vectorize_mode(d, &tfidf, algorithm.value_mode()), *l))
            .collect();
        let cfg = AlgoConfig {
            algorithm,
            hyperparams: Hyperparams {
                seed,
                ..Default::default()
            },
        };
        let report = cross_validate(&cfg, &vectors, rounds, test_fraction, seed)?;
        reports.push((algorithm.name().to_string(), report));
    }

    let table = report::render_eval_table(&reports);
    print!("{table}");
    if let Some(out) = out {
        let body = match format {
            EvalFormat::Md => table.clone(),
            EvalFormat::Json => serde_json::to_string_pretty(&EvalOutput {
                schema_version: crate::record::SCHEMA_VERSION,
                task,
                rounds,
                test_fraction,
                seed,
                reports: reports.clone(),
                search_log,
            })?,
        };
        std::fs::write(out, body).map_err(|e| Error::io(out, e))?;
        println!("report -> {}", out.display());
    }
    Ok(0)
}

fn cmd_classify(model_path: &Path, input: &Path, out: &Path) -> Result<i32> {
    let model: TrainedModel = load_model(model_path)?;
    let mut records = ingest_coded_corpus(input)?;
    for record in &mut records {
        let mut doc = preprocess(&record.text);
        doc.source_id = record.id.clone();
        let (label, scores) = classify_doc(&model, &doc)?;
        let prediction = Prediction {
            label: label.name().to_string(),
            scores,
        };
        let predicted = record.predicted.get_or_insert_with(Predicted::default);
        match model.task {
            Task::Reason => predicted.reason = Some(prediction),
            Task::Purpose => predicted.purpose = Some(prediction),
        }
    }
    write_jsonl(out, &records)?;
    println!("classified {} records -> {}", records.len(), out.display());
    Ok(0)
}

fn cmd_readiness(
    input: &Path,
    fixtures: Option<&Path>,
    live: bool,
    out: &Path,
    drafts: Option<&Path>,
) -> Result<i32> {
    let records = ingest_coded_corpus(input)?;
    let client: Box<dyn ForgeClient> = match (fixtures, live) {
        (Some(dir), false) => Box::new(FixtureClient::new(dir)),
        (None, true) => Box::new(HttpForgeClient::from_env()?),
        _ => {
            return Err(Error::Domain(
                "readiness needs exactly one of --fixtures or --live".into(),
            ))
        }
    };
    let verdicts = assess_records(&records, client.as_ref());
    let lines: Vec<VerdictRecord> = verdicts
        .iter()
        .map(|(id, v)| VerdictRecord::new(id.clone(), v))
        .collect();
    write_jsonl(out, &lines)?;
    let ready = verdicts
        .iter()
        .filter(|(_, v)| v.outcome == Outcome::Ready)
        .count();
    println!(
        "assessed {} records, {} ready -> {}",
        verdicts.len(),
        ready,
        out.display()
    );
    if let Some(dir) = drafts {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let by_id: BTreeMap<&str, &SatdRecord> =
            records.iter().map(|r| (r.id.as_str(), r)).collect();
        for (id, verdict) in &verdicts {
            if verdict.outcome != Outcome::Ready {
                continue;
            }
            let record = by_id[id.as_str()];
            let draft = draft_remediation_report(record, verdict)?;
            let name: String = id
                .chars()
                .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' })
                .collect();
            let path = dir.join(format!("{name}.md"));
            std::fs::write(&path, draft).map_err(|e| Error::io(&path, e))?;
        }
        println!("drafts -> {}", dir.display());
    }
    Ok(0)
}

fn cmd_report(
    input: &Path,
    out_dir: &Path,
    root: Option<&Path>,
    per_class: usize,
    n_max: usize,
) -> Result<i32> {
    let records = ingest_coded_corpus(input)?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let loc_counts = match root {
        Some(root) => Some(measure_corpus_loc(root)?),
        None => None,
    };
    let mut summary = String::new();
    summary.push_str("# SATD corpus report\n\n");
    summary.push_str(&format!("records: {}\n\n", records.len()));
    summary.push_str("## Locations\n\n```\n");
    summary.push_str(&report::render_location_table(&records, loc_counts.as_ref()));
    summary.push_str("```\n\n## Reasons\n\n```\n");
    summary.push_str(&report::render_reason_table(&records));
    summary.push_str("```\n\n## Purposes\n\n```\n");
    summary.push_str(&report::render_purpose_table(&records));
    summary.push_str("```\n");

    // Co-occurrence matrices, when the corpus is fully labelled.
    let coded: Vec<SatdRecord> = records
        .iter()
        .filter(|r| r.reason.is_some() && r.purpose.is_some())
        .cloned()
        .collect();
    if !coded.is_empty() {
        let reasons = report::co_occurrence(&coded, report::CoDims::LocationReason)?;
        let purposes = report::co_occurrence(&coded, report::CoDims::LocationPurpose)?;
        let p1 = out_dir.join("location_reason.csv");
        std::fs::write(&p1, reasons.to_csv()).map_err(|e| Error::io(&p1, e))?;
        let p2 = out_dir.join("location_purpose.csv");
        std::fs::write(&p2, purposes.to_csv()).map_err(|e| Error::io(&p2, e))?;
    }

    // Top n-gram features per merged class, when labels support it.
    for task in [Task::Reason, Task::Purpose] {
        let Ok(data) = task_data(&records, task) else { continue };
        let labelled: Vec<(TokenDoc, String)> = data
            .iter()
            .map(|(d, l)| (d.clone(), l.name().to_string()))
            .collect();
        let Ok(vocab) = crate::text::build_ngram_vocabulary(&labelled, n_max) else {
            continue;
        };
        let rows: Vec<report::FeatureRow> = report::top_features(&vocab, per_class)
            .into_iter()
            .filter(|r| r.class != "Other")
            .collect();
        let name = match task {
            Task::Reason => "features_reason.txt",
            Task::Purpose => "features_purpose.txt",
        };
        let path = out_dir.join(name);
        std::fs::write(&path, report::render_feature_table(&rows))
            .map_err(|e| Error::io(&path, e))?;
    }

    let summary_path = out_dir.join("summary.md");
    std::fs::write(&summary_path, &summary).map_err(|e| Error::io(&summary_path, e))?;
    print!("{summary}");
    println!("report files -> {}", out_dir.display());
    Ok(0)
}

/// Sum per-location LOC over every parseable build file under `root`.
fn measure_corpus_loc(root: &Path) -> Result<BTreeMap<LocationCategory, usize>> {
    let (files, _) = pom::discover_build_files(root, DEFAULT_PATTERN)?;
    let mut totals: BTreeMap<LocationCategory, usize> = BTreeMap::new();
    for file in &files {
        let path = root.join(&file.rel_path);
        let Ok(bytes) = std::fs::read(&path) else { continue };
        let content = String::from_utf8_lossy(&bytes);
        let Ok(counts) = pom::measure_location_loc(&content) else {
            continue;
        };
        for (cat, n) in counts {
            *totals.entry(cat).or_insert(0) += n;
        }
    }
    Ok(totals)
}
