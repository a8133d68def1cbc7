//! Acceptance gate: one test per release criterion, each printing a
//! PASS line (run with `cargo test --test acceptance -- --nocapture`).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use buildsatd::detect::{detect_satd, load_keyword_set, scan_corpus};
use buildsatd::eval::{cohen_kappa, cross_validate, metrics, representative_sample_size};
use buildsatd::labels::{MergedLabel, MergedReason};
use buildsatd::model::search::model_search;
use buildsatd::model::{
    load_model, predict, save_model, train, AlgoConfig, Algorithm, Hyperparams, ModelParams,
};
use buildsatd::pom::{classify_location, BuildComment, BuildFile, LocationCategory};
use buildsatd::record::ingest_coded_corpus;
use buildsatd::text::{ngram_idf_weight, FeatureVector, TokenDoc};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

#[test]
fn criterion_01_sample_size_reproduction() {
    let start = Instant::now();
    let n = representative_sample_size(248_502, 0.95, 0.05).unwrap();
    let elapsed = start.elapsed();
    assert_eq!(n, 384);
    assert!(
        elapsed.as_micros() < 1000,
        "took {elapsed:?}, budget is 1ms"
    );
    println!("PASS criterion 01: sample size (248502, 0.95, 0.05) = 384 in {elapsed:?}");
}

#[test]
fn criterion_02_ngram_idf_reduces_to_classic_idf() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..1000 {
        let n = rng.random_range(1..=10_000usize);
        let d = rng.random_range(1..=n);
        let got = ngram_idf_weight(d, d, n).unwrap();
        let expected = (n as f64 / d as f64).ln();
        assert!(
            (got - expected).abs() < 1e-12,
            "d={d} n={n}: {got} vs {expected}"
        );
    }
    println!("PASS criterion 02: ngram idf anchor holds on 1000 sampled (d, N) pairs at 1e-12");
}

fn toy_vec(entries: &[(u32, f64)]) -> FeatureVector {
    FeatureVector {
        dim: 4,
        entries: entries.to_vec(),
    }
}

#[test]
fn criterion_03_naive_bayes_closed_form_oracle() {
    let lim = MergedLabel::Reason(MergedReason::Limitation);
    let dep = MergedLabel::Reason(MergedReason::Dependency);
    let data = vec![
        (toy_vec(&[(0, 2.0), (1, 1.0)]), lim),
        (toy_vec(&[(0, 1.0), (1, 1.0)]), lim),
        (toy_vec(&[(2, 2.0), (3, 1.0)]), dep),
        (toy_vec(&[(2, 1.0), (3, 1.0)]), dep),
    ];
    let model = train(Algorithm::NaiveBayes, &Hyperparams::default(), &data).unwrap();
    // Closed form: priors 2/4 each; per-class totals are 5 occurrences, so
    // theta = (count + 1) / (5 + 4) with counts (3,2,0,0) and (0,0,3,2).
    let expected_lim: [f64; 4] = [4.0 / 9.0, 3.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0];
    let expected_dep: [f64; 4] = [1.0 / 9.0, 1.0 / 9.0, 4.0 / 9.0, 3.0 / 9.0];
    let ModelParams::NaiveBayes {
        log_priors,
        log_likelihoods,
        ..
    } = &model.params
    else {
        panic!("expected NB parameters")
    };
    for prior in log_priors {
        assert!((prior - 0.5f64.ln()).abs() < 1e-9);
    }
    for t in 0..4 {
        assert!((log_likelihoods[0][t] - expected_lim[t].ln()).abs() < 1e-9);
        assert!((log_likelihoods[1][t] - expected_dep[t].ln()).abs() < 1e-9);
    }
    let held_out = toy_vec(&[(0, 1.0), (1, 1.0)]);
    let raw = model.raw_scores(&held_out).unwrap();
    let expected_joint_lim = 0.5f64.ln() + expected_lim[0].ln() + expected_lim[1].ln();
    let expected_joint_dep = 0.5f64.ln() + expected_dep[0].ln() + expected_dep[1].ln();
    assert!((raw[0] - expected_joint_lim).abs() < 1e-9);
    assert!((raw[1] - expected_joint_dep).abs() < 1e-9);
    let (label, _) = predict(&model, &held_out).unwrap();
    assert_eq!(label, lim);
    println!("PASS criterion 03: NB log-posteriors match the closed form at 1e-9");
}

#[test]
fn criterion_04_metrics_oracle() {
    let labels = vec!["a".to_string(), "b".to_string()];
    let m = metrics(&[vec![8, 2], vec![4, 6]], &labels).unwrap();
    assert!((m.per_class[0].precision - 0.6667).abs() < 1e-4);
    assert!((m.per_class[0].recall - 0.8).abs() < 1e-4);
    assert!((m.per_class[0].f1 - 0.7273).abs() < 1e-4);
    let diag = metrics(&[vec![9, 0], vec![0, 3]], &labels).unwrap();
    for c in &diag.per_class {
        assert_eq!(c.precision, 1.0);
        assert_eq!(c.recall, 1.0);
        assert_eq!(c.f1, 1.0);
    }
    assert_eq!(diag.macro_f1, 1.0);
    assert_eq!(diag.weighted_f1, 1.0);
    println!("PASS criterion 04: metrics oracle ([[8,2],[4,6]] and diagonal) holds");
}

#[test]
fn criterion_05_kappa_oracle() {
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (count, (x, y)) in [(20, ("y", "y")), (5, ("y", "n")), (10, ("n", "y")), (15, ("n", "n"))]
    {
        for _ in 0..count {
            a.push(x);
            b.push(y);
        }
    }
    let k = cohen_kappa(&a, &b).unwrap();
    assert!((k - 0.4).abs() < 1e-9, "kappa {k}");
    assert_eq!(cohen_kappa(&a, &a).unwrap(), 1.0);
    println!("PASS criterion 05: kappa oracle (0.4000 on the 50-item table; 1.0 on identity)");
}

#[test]
fn criterion_06_detection_fixture_perfect_precision_recall() {
    #[derive(serde::Deserialize)]
    struct Truth {
        path: String,
        line_start: usize,
        is_satd: bool,
    }
    let truth: Vec<Truth> = std::fs::read_to_string(fixture("detect60_truth.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(truth.len(), 60);
    assert_eq!(truth.iter().filter(|t| t.is_satd).count(), 30);

    let ks = load_keyword_set(None).unwrap();
    let start = Instant::now();
    let scan = scan_corpus(&fixture("detect60"), "pom.xml", &ks).unwrap();
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "scan took {elapsed:?}");
    assert_eq!(scan.n_comments, 60);

    let detected: std::collections::HashSet<(String, usize)> = scan
        .records
        .iter()
        .map(|r| (r.path.clone(), r.line_start))
        .collect();
    let mut tp = 0;
    let mut fp = 0;
    let mut fn_ = 0;
    for t in &truth {
        let hit = detected.contains(&(t.path.clone(), t.line_start));
        match (t.is_satd, hit) {
            (true, true) => tp += 1,
            (true, false) => fn_ += 1,
            (false, true) => fp += 1,
            (false, false) => {}
        }
    }
    assert_eq!((tp, fp, fn_), (30, 0, 0), "tp/fp/fn mismatch");
    println!(
        "PASS criterion 06: detection P = R = 1.0 on the 60-comment fixture in {elapsed:?}"
    );
}

#[test]
fn criterion_07_location_tag_table() {
    let file = BuildFile {
        repo_id: ".".into(),
        rel_path: "pom.xml".into(),
        content_hash: String::new(),
        total_loc: 0,
    };
    let comment = |path: &[&str]| BuildComment {
        file: file.clone(),
        text: String::new(),
        line_start: 1,
        line_end: 1,
        enclosing_path: path.iter().map(|s| s.to_string()).collect(),
        annotated_sibling: None,
    };
    use LocationCategory::*;
    let table: Vec<(Vec<&str>, LocationCategory)> = vec![
        (vec!["project", "build", "plugins"], PluginConfiguration),
        (vec!["project", "profiles"], PluginConfiguration),
        (vec!["project", "dependencies"], ExternalDependenciesConfiguration),
        (vec!["project", "properties"], BuildVariables),
        (vec!["project", "parent"], MultiDirectoryConfiguration),
        (vec!["project", "build", "resources"], ResourceConfiguration),
        (vec!["project", "repositories"], RepositoryConfiguration),
        (vec!["project", "artifactId"], ProjectMetadata),
        (vec!["project", "groupId"], ProjectMetadata),
        (vec!["project", "url"], ProjectMetadata),
        (vec!["project", "packaging"], BuildOrganization),
        (vec!["project", "scm"], SoftwareConfigurationManagement),
    ];
    let mut agree = 0;
    for (path, expected) in &table {
        let got = classify_location(&comment(path));
        assert_eq!(got, *expected, "path {path:?}");
        agree += 1;
    }
    assert_eq!(agree, table.len());
    println!(
        "PASS criterion 07: all {} example location tags map to their categories",
        table.len()
    );
}

/// Seeded synthetic corpus: class-specific keyword templates plus shared
/// noise tokens. Absolute scores from externally coded corpora are not
/// reproducible without that data, so this gate runs on generated records;
/// real corpora flow through the same ingest and eval paths.
fn synthetic_corpus(n: usize, seed: u64) -> Vec<(TokenDoc, MergedLabel)> {
    let pools: [(&[&str], MergedLabel, usize); 3] = [
        (
            &["library", "upstream", "limitation", "shade", "breaks", "tool"],
            MergedLabel::Reason(MergedReason::Limitation),
            5,
        ),
        (
            &["dependency", "stale", "conflict", "artifact", "transitive", "exclusion"],
            MergedLabel::Reason(MergedReason::Dependency),
            3,
        ),
        (
            &["license", "metadata", "recursive", "warning", "smell", "propagate"],
            MergedLabel::Reason(MergedReason::Other),
            2,
        ),
    ];
    let noise = [
        "todo", "fix", "the", "for", "maven", "build", "plugin", "see", "note", "until",
    ];
    let weights: usize = pools.iter().map(|(_, _, w)| w).sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let mut pick = i % weights;
            let (pool, label) = pools
                .iter()
                .find_map(|(pool, label, w)| {
                    if pick < *w {
                        Some((*pool, *label))
                    } else {
                        pick -= w;
                        None
                    }
                })
                .expect("weighted pick lands");
            let n_class = rng.random_range(3..=6);
            let n_noise = rng.random_range(2..=5);
            let mut tokens: Vec<String> = (0..n_class)
                .map(|_| pool[rng.random_range(0..pool.len())].to_string())
                .collect();
            for _ in 0..n_noise {
                tokens.push(noise[rng.random_range(0..noise.len())].to_string());
            }
            (TokenDoc::new(tokens, format!("synthetic-{i}")), label)
        })
        .collect()
}

#[test]
fn criterion_08_desk_scale_classification() {
    let start = Instant::now();
    let data = synthetic_corpus(500, 42);
    let (best, log) = model_search(&data, 4, 20, 7).unwrap();
    assert_eq!(log.len(), 20);
    let vocab = best.vocabulary.as_ref().unwrap();
    let vectors: Vec<(FeatureVector, MergedLabel)> = data
        .iter()
        .map(|(d, l)| {
            (
                buildsatd::text::vectorize_mode(d, vocab, best.algorithm.value_mode()),
                *l,
            )
        })
        .collect();
    let cfg = AlgoConfig {
        algorithm: best.algorithm,
        hyperparams: best.hyperparams.clone(),
    };
    let report = cross_validate(&cfg, &vectors, 10, 0.1, 7).unwrap();
    let elapsed = start.elapsed();
    assert!(
        report.mean.weighted_f1 >= 0.90,
        "weighted F1 {} below 0.90",
        report.mean.weighted_f1
    );
    assert!(
        elapsed.as_secs() < 300,
        "took {elapsed:?}, budget is 5 minutes"
    );
    // A coded corpus supplied through the ingest path must evaluate
    // end-to-end and emit the algorithm-column report.
    let out = tempfile::tempdir().unwrap();
    let report_path = out.path().join("eval.json");
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_buildsatd"))
        .args([
            "eval",
            "--coded",
            fixture("coded_corpus.jsonl").to_str().unwrap(),
            "--task",
            "reason",
            "--rounds",
            "3",
            "--budget",
            "4",
            "--n-max",
            "2",
            "--format",
            "json",
            "--out",
            report_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(json["reports"].as_array().unwrap().len(), 4);
    println!(
        "PASS criterion 08: searched model reaches weighted F1 {:.4} (gate 0.90) in {elapsed:?}; coded-corpus eval runs end-to-end",
        report.mean.weighted_f1
    );
}

#[test]
fn criterion_09_readiness_fixture_suite() {
    let records = ingest_coded_corpus(&fixture("forge_records.jsonl")).unwrap();
    let client = buildsatd::forge::FixtureClient::new(fixture("forge"));
    let verdicts = buildsatd::readiness::assess_records(&records, &client);
    let by_id: BTreeMap<&str, &buildsatd::readiness::ReadinessVerdict> = verdicts
        .iter()
        .map(|(id, v)| (id.as_str(), v))
        .collect();
    use buildsatd::readiness::{ExclusionRule, Outcome};
    let expect = |id: &str, outcome: Outcome| {
        assert_eq!(by_id[id].outcome, outcome, "record {id}");
    };
    expect("r01", Outcome::Ready); // closed + fixed
    expect("r02", Outcome::OnHold); // open issue
    expect("r03", Outcome::Excluded { rule: ExclusionRule::I }); // archived repo reference
    expect("r04", Outcome::Excluded { rule: ExclusionRule::III }); // mirror
    expect("r05", Outcome::Excluded { rule: ExclusionRule::IV }); // cross-reference flag
    expect("r06", Outcome::OnHold); // 404
    expect("r07", Outcome::Ready); // JIRA resolved
    expect("r08", Outcome::Ready); // GitHub closed
    expect("r09", Outcome::OnHold); // fetch error
    expect("r10", Outcome::Ready); // multi-link, any ready link suffices
    expect("r11", Outcome::Excluded { rule: ExclusionRule::II }); // issue repo archived
    expect("r12", Outcome::Excluded { rule: ExclusionRule::I }); // precedence: I beats II/III/IV
    assert!(by_id["r06"].evidence[0].error.is_some());
    assert!(by_id["r09"].evidence[0].error.is_some());
    println!("PASS criterion 09: all 12 recorded readiness scenarios produce their hand-assigned verdicts");
}

#[test]
fn criterion_10_byte_determinism() {
    let bin = env!("CARGO_BIN_EXE_buildsatd");
    let dir = tempfile::tempdir().unwrap();
    let run_eval = |out: &Path, threads: &str| {
        let output = std::process::Command::new(bin)
            .env("RAYON_NUM_THREADS", threads)
            .args([
                "eval",
                "--coded",
                fixture("coded_corpus.jsonl").to_str().unwrap(),
                "--task",
                "reason",
                "--seed",
                "7",
                "--rounds",
                "3",
                "--budget",
                "4",
                "--n-max",
                "2",
                "--format",
                "json",
                "--out",
                out.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert_eq!(output.status.code(), Some(0));
        output.stdout
    };
    let e1 = dir.path().join("e1.json");
    let e2 = dir.path().join("e2.json");
    // Drop the trailing "report -> <path>" line; the paths differ by design.
    let table_only = |stdout: Vec<u8>| -> String {
        String::from_utf8_lossy(&stdout)
            .lines()
            .filter(|l| !l.starts_with("report ->"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let s1 = table_only(run_eval(&e1, "1"));
    let s2 = table_only(run_eval(&e2, "4"));
    assert_eq!(s1, s2, "eval stdout differs across runs/threads");
    assert_eq!(std::fs::read(&e1).unwrap(), std::fs::read(&e2).unwrap());

    let run_readiness = |out: &Path, threads: &str| {
        let output = std::process::Command::new(bin)
            .env("RAYON_NUM_THREADS", threads)
            .args([
                "readiness",
                "--input",
                fixture("forge_records.jsonl").to_str().unwrap(),
                "--fixtures",
                fixture("forge").to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert_eq!(output.status.code(), Some(0));
    };
    let r1 = dir.path().join("r1.jsonl");
    let r2 = dir.path().join("r2.jsonl");
    run_readiness(&r1, "1");
    run_readiness(&r2, "4");
    assert_eq!(std::fs::read(&r1).unwrap(), std::fs::read(&r2).unwrap());
    println!("PASS criterion 10: eval and readiness outputs are byte-identical across runs and thread counts");
}

#[test]
fn criterion_11_round_trips() {
    // Model save/load reproduces predictions bit-exactly on random vectors.
    let data = synthetic_corpus(60, 9);
    let (model, _) = model_search(&data, 2, 6, 3).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    save_model(&model, &path).unwrap();
    let loaded = load_model(&path).unwrap();
    assert_eq!(model, loaded);
    let dim = model.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..100 {
        let mut entries = Vec::new();
        for i in 0..dim.min(40) as u32 {
            if rng.random_bool(0.2) {
                entries.push((i, rng.random_range(-2.0..2.0)));
            }
        }
        let v = FeatureVector { dim, entries };
        let a = model.raw_scores(&v).unwrap();
        let b = loaded.raw_scores(&v).unwrap();
        assert_eq!(a, b, "scores diverge after reload");
        assert_eq!(
            predict(&model, &v).unwrap().0,
            predict(&loaded, &v).unwrap().0
        );
    }

    // Every emitted JSONL reloads through its ingest path.
    let bin = env!("CARGO_BIN_EXE_buildsatd");
    let comments = dir.path().join("comments.jsonl");
    let satd = dir.path().join("satd.jsonl");
    let verdicts = dir.path().join("verdicts.jsonl");
    for args in [
        vec![
            "scan",
            "--root",
            fixture("mini_corpus").to_str().unwrap(),
            "--out",
            comments.to_str().unwrap(),
        ],
        vec![
            "detect",
            "--root",
            fixture("mini_corpus").to_str().unwrap(),
            "--out",
            satd.to_str().unwrap(),
        ],
        vec![
            "readiness",
            "--input",
            fixture("forge_records.jsonl").to_str().unwrap(),
            "--fixtures",
            fixture("forge").to_str().unwrap(),
            "--out",
            verdicts.to_str().unwrap(),
        ],
    ] {
        let output = std::process::Command::new(bin).args(&args).output().unwrap();
        assert_eq!(output.status.code(), Some(0), "command {args:?}");
    }
    assert_eq!(
        buildsatd::record::read_comment_jsonl(&comments).unwrap().len(),
        10
    );
    assert_eq!(ingest_coded_corpus(&satd).unwrap().len(), 4);
    let verdict_lines = std::fs::read_to_string(&verdicts).unwrap();
    for line in verdict_lines.lines() {
        let _: buildsatd::readiness::VerdictRecord = serde_json::from_str(line).unwrap();
    }
    // Detection of raw text still works after the round trip.
    let ks = load_keyword_set(None).unwrap();
    for record in ingest_coded_corpus(&satd).unwrap() {
        assert!(detect_satd(&record.text, &ks).is_satd);
    }
    println!("PASS criterion 11: model and JSONL round-trips are exact");
}
