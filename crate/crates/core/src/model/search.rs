//! Seeded random search over algorithms, hyperparameter grids, and feature
//! modes, scored by support-weighted F1 under an inner 5-round stratified
//! shuffle. A desk-scale stand-in for heavyweight automated-ML toolkits
//! with the same objective.

use rand::prelude::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::cross_validate;
use crate::labels::MergedLabel;
use crate::text::{
    build_ngram_vocabulary, build_tfidf_vocabulary, vectorize_mode, FeatureVector,
    NgramVocabulary, TokenDoc,
};

use super::{train, AlgoConfig, Algorithm, FeatureMode, Hyperparams, TrainedModel};

/// Default n-gram order: reported discriminative features reach trigrams,
/// so one extra order gives headroom cheaply.
pub const DEFAULT_N_MAX: usize = 4;

const INNER_ROUNDS: usize = 5;
const INNER_TEST_FRACTION: f64 = 0.2;

/// One search trial, as logged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialLog {
    pub trial: usize,
    pub seed: u64,
    pub algorithm: Algorithm,
    pub feature_mode: FeatureMode,
    pub hyperparams: Hyperparams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weighted_f1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Both feature spaces for one labelled corpus, so every trial vectorizes
/// against a fixed term space.
struct FeatureSpaces {
    ngram_vocab: NgramVocabulary,
    tfidf_vocab: NgramVocabulary,
}

impl FeatureSpaces {
    fn build(data: &[(TokenDoc, MergedLabel)], n_max: usize) -> Result<Self> {
        let labelled: Vec<(TokenDoc, String)> = data
            .iter()
            .map(|(d, l)| (d.clone(), l.name().to_string()))
            .collect();
        let docs: Vec<TokenDoc> = data.iter().map(|(d, _)| d.clone()).collect();
        Ok(FeatureSpaces {
            ngram_vocab: build_ngram_vocabulary(&labelled, n_max)?,
            tfidf_vocab: build_tfidf_vocabulary(&docs)?,
        })
    }

    fn vocab(&self, mode: FeatureMode) -> &NgramVocabulary {
        match mode {
            FeatureMode::NgramIdf => &self.ngram_vocab,
            FeatureMode::TfIdf => &self.tfidf_vocab,
        }
    }

    fn vectors(
        &self,
        data: &[(TokenDoc, MergedLabel)],
        mode: FeatureMode,
        algorithm: Algorithm,
    ) -> Vec<(FeatureVector, MergedLabel)> {
        let vocab = self.vocab(mode);
        data.iter()
            .map(|(d, l)| (vectorize_mode(d, vocab, algorithm.value_mode()), *l))
            .collect()
    }
}

/// Random search over {algorithm x hyperparameters x feature mode}. Returns
/// the best configuration retrained on all data, plus a log of every trial.
/// Deterministic for a fixed seed; an exhausted budget is never an error —
/// the best model found so far wins.
pub fn model_search(
    data: &[(TokenDoc, MergedLabel)],
    n_max: usize,
    budget: usize,
    seed: u64,
) -> Result<(TrainedModel, Vec<TrialLog>)> {
    if data.len() < 20 {
        return Err(Error::Domain(format!(
            "model search needs at least 20 samples, got {}",
            data.len()
        )));
    }
    let mut classes: Vec<MergedLabel> = data.iter().map(|(_, l)| *l).collect();
    classes.sort();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::SingleClass);
    }
    if budget < 1 {
        return Err(Error::Domain("budget must be >= 1".into()));
    }

    let spaces = FeatureSpaces::build(data, n_max)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut log = Vec::with_capacity(budget);
    let mut best: Option<(f64, usize, Algorithm, FeatureMode, Hyperparams)> = None;
    let mut last_error: Option<Error> = None;

    for trial in 0..budget {
        let trial_seed = seed ^ trial as u64;
        let algorithm = *Algorithm::ALL.choose(&mut rng).expect("non-empty");
        let feature_mode = *[FeatureMode::NgramIdf, FeatureMode::TfIdf]
            .choose(&mut rng)
            .expect("non-empty");
        let hyperparams = draw_hyperparams(algorithm, trial_seed, &mut rng);
        let vectors = spaces.vectors(data, feature_mode, algorithm);
        let config = AlgoConfig {
            algorithm,
            hyperparams: hyperparams.clone(),
        };
        let outcome = cross_validate(
            &config,
            &vectors,
            INNER_ROUNDS,
            INNER_TEST_FRACTION,
            trial_seed,
        );
        match outcome {
            Ok(report) => {
                let score = report.mean.weighted_f1;
                let improves = best.as_ref().is_none_or(|(s, ..)| score > *s);
                if improves {
                    best = Some((score, trial, algorithm, feature_mode, hyperparams.clone()));
                }
                log.push(TrialLog {
                    trial,
                    seed: trial_seed,
                    algorithm,
                    feature_mode,
                    hyperparams,
                    weighted_f1: Some(score),
                    error: None,
                });
            }
            Err(e) => {
                log.push(TrialLog {
                    trial,
                    seed: trial_seed,
                    algorithm,
                    feature_mode,
                    hyperparams,
                    weighted_f1: None,
                    error: Some(e.to_string()),
                });
                last_error = Some(e);
            }
        }
    }

    let Some((_, _, algorithm, feature_mode, hyperparams)) = best else {
        return Err(last_error.unwrap_or(Error::EmptyTrainingSet));
    };
    let vectors = spaces.vectors(data, feature_mode, algorithm);
    let mut model = train(algorithm, &hyperparams, &vectors)?;
    model.feature_mode = Some(feature_mode);
    model.vocabulary = Some(spaces.vocab(feature_mode).clone());
    Ok((model, log))
}

fn draw_hyperparams(algorithm: Algorithm, trial_seed: u64, rng: &mut ChaCha8Rng) -> Hyperparams {
    let mut hp = Hyperparams {
        seed: trial_seed,
        ..Default::default()
    };
    match algorithm {
        Algorithm::NaiveBayes => {
            hp.alpha = *[0.1, 0.5, 1.0, 2.0].choose(rng).expect("non-empty");
        }
        Algorithm::Knn => {
            hp.k = *[1usize, 3, 5, 7, 9].choose(rng).expect("non-empty");
        }
        Algorithm::Svm => {
            hp.c = *[0.1, 1.0, 10.0].choose(rng).expect("non-empty");
            hp.epochs = *[20usize, 50].choose(rng).expect("non-empty");
        }
    }
    hp
}

/// Classify a preprocessed document with a pipeline-trained model (one that
/// carries its vocabulary and feature mode).
pub fn classify_doc(
    model: &TrainedModel,
    doc: &TokenDoc,
) -> Result<(MergedLabel, std::collections::BTreeMap<String, f64>)> {
    let vocab = model
        .vocabulary
        .as_ref()
        .ok_or_else(|| Error::Domain("model has no inline vocabulary".into()))?;
    let v = vectorize_mode(doc, vocab, model.algorithm.value_mode());
    super::predict(model, &v)
}
