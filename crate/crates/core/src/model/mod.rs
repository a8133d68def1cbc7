//! Reason/purpose classifiers: multinomial Naive Bayes, k-nearest
//! neighbors with cosine distance, and a linear one-vs-rest SVM, behind a
//! single train/predict entry point with JSON persistence.
//!
//! Per-algorithm feature contract: NB consumes raw term-frequency vectors
//! (n-gram IDF weights can be negative, which breaks the multinomial count
//! assumption); KNN and SVM consume weighted vectors.

mod knn;
mod nb;
pub mod search;
mod svm;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labels::{MergedLabel, Task};
use crate::text::{FeatureVector, NgramVocabulary, ValueMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    #[serde(rename = "nb")]
    NaiveBayes,
    Knn,
    Svm,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::NaiveBayes, Algorithm::Knn, Algorithm::Svm];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::NaiveBayes => "nb",
            Algorithm::Knn => "knn",
            Algorithm::Svm => "svm",
        }
    }

    /// Which vectorization each algorithm consumes.
    pub fn value_mode(&self) -> ValueMode {
        match self {
            Algorithm::NaiveBayes => ValueMode::Counts,
            Algorithm::Knn | Algorithm::Svm => ValueMode::Weighted,
        }
    }
}

/// Hyperparameters for all algorithms; each algorithm reads its own fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    /// NB Laplace smoothing.
    pub alpha: f64,
    /// KNN neighbor count (odd by default).
    pub k: usize,
    /// SVM hinge-loss cost.
    pub c: f64,
    /// SVM training epochs.
    pub epochs: usize,
    /// SVM shuffle seed.
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            alpha: 1.0,
            k: 5,
            c: 1.0,
            epochs: 30,
            seed: 0,
        }
    }
}

/// Which feature space a pipeline-trained model was built on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureMode {
    NgramIdf,
    TfIdf,
}

impl FeatureMode {
    pub fn name(&self) -> &'static str {
        match self {
            FeatureMode::NgramIdf => "ngram_idf",
            FeatureMode::TfIdf => "tf_idf",
        }
    }
}

/// Algorithm-specific fitted parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ModelParams {
    NaiveBayes {
        /// ln P(class), in label-set order.
        log_priors: Vec<f64>,
        /// ln P(term | class), [class][term].
        log_likelihoods: Vec<Vec<f64>>,
        /// Added to every present feature value to make counts non-negative
        /// (zero when training data was already non-negative).
        shift: f64,
    },
    Knn {
        /// L2-normalized training vectors.
        vectors: Vec<FeatureVector>,
        /// Label index per stored vector.
        labels: Vec<usize>,
        k: usize,
    },
    Svm {
        /// One-vs-rest weight vectors, [class][feature].
        weights: Vec<Vec<f64>>,
        biases: Vec<f64>,
    },
}

/// A fitted classifier plus everything needed to reuse it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub schema_version: u32,
    pub algorithm: Algorithm,
    pub hyperparams: Hyperparams,
    pub task: Task,
    /// Class labels in canonical order; also the tie-break order.
    pub label_set: Vec<MergedLabel>,
    /// Present when the model was trained through the feature pipeline.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feature_mode: Option<FeatureMode>,
    /// Inline vocabulary for end-to-end classification of raw text.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vocabulary: Option<NgramVocabulary>,
    pub params: ModelParams,
}

pub(crate) fn check_dims(data: &[(FeatureVector, MergedLabel)]) -> Result<usize> {
    let dim = data[0].0.dim;
    for (v, _) in data {
        if v.dim != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: v.dim,
            });
        }
    }
    Ok(dim)
}

/// Fit `algorithm` on labelled vectors.
pub fn train(
    algorithm: Algorithm,
    hyperparams: &Hyperparams,
    data: &[(FeatureVector, MergedLabel)],
) -> Result<TrainedModel> {
    if data.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let dim = check_dims(data)?;
    let mut label_set: Vec<MergedLabel> = data.iter().map(|(_, l)| *l).collect();
    label_set.sort();
    label_set.dedup();
    if label_set.len() < 2 {
        return Err(Error::SingleClass);
    }
    let task = label_set[0].task();
    let y: Vec<usize> = data
        .iter()
        .map(|(_, l)| label_set.binary_search(l).expect("label in set"))
        .collect();
    let params = match algorithm {
        Algorithm::NaiveBayes => {
            if !hyperparams.alpha.is_finite() || hyperparams.alpha <= 0.0 {
                return Err(Error::InvalidHyperparam(format!(
                    "nb smoothing alpha must be > 0, got {}",
                    hyperparams.alpha
                )));
            }
            nb::fit(data, &y, label_set.len(), dim, hyperparams.alpha)
        }
        Algorithm::Knn => {
            if hyperparams.k < 1 || hyperparams.k > data.len() {
                return Err(Error::InvalidHyperparam(format!(
                    "knn k must be in 1..={}, got {}",
                    data.len(),
                    hyperparams.k
                )));
            }
            knn::fit(data, &y, hyperparams.k)
        }
        Algorithm::Svm => {
            if !hyperparams.c.is_finite() || hyperparams.c <= 0.0 {
                return Err(Error::InvalidHyperparam(format!(
                    "svm cost must be > 0, got {}",
                    hyperparams.c
                )));
            }
            if hyperparams.epochs == 0 {
                return Err(Error::InvalidHyperparam("svm epochs must be >= 1".into()));
            }
            svm::fit(data, &y, label_set.len(), dim, hyperparams).params
        }
    };
    Ok(TrainedModel {
        schema_version: 1,
        algorithm,
        hyperparams: hyperparams.clone(),
        task,
        label_set,
        feature_mode: None,
        vocabulary: None,
        params,
    })
}

impl TrainedModel {
    pub fn dim(&self) -> usize {
        match &self.params {
            ModelParams::NaiveBayes {
                log_likelihoods, ..
            } => log_likelihoods.first().map_or(0, |row| row.len()),
            ModelParams::Knn { vectors, .. } => vectors.first().map_or(0, |v| v.dim),
            ModelParams::Svm { weights, .. } => weights.first().map_or(0, |w| w.len()),
        }
    }

    /// Raw per-class scores in label-set order: log-posteriors for NB, vote
    /// fractions for KNN, decision values for SVM.
    pub fn raw_scores(&self, v: &FeatureVector) -> Result<Vec<f64>> {
        if v.dim != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: v.dim,
            });
        }
        Ok(match &self.params {
            ModelParams::NaiveBayes {
                log_priors,
                log_likelihoods,
                shift,
            } => nb::log_posteriors(log_priors, log_likelihoods, *shift, v),
            ModelParams::Knn { vectors, labels, k } => {
                knn::vote_fractions(vectors, labels, *k, self.label_set.len(), v)
            }
            ModelParams::Svm { weights, biases } => svm::decision_values(weights, biases, v),
        })
    }

    /// Per-class scores keyed by label name. NB scores are normalized
    /// posterior probabilities.
    pub fn score_map(&self, v: &FeatureVector) -> Result<BTreeMap<String, f64>> {
        let raw = self.raw_scores(v)?;
        let scores = match self.algorithm {
            Algorithm::NaiveBayes => normalize_log(&raw),
            _ => raw,
        };
        Ok(self
            .label_set
            .iter()
            .zip(scores)
            .map(|(l, s)| (l.name().to_string(), s))
            .collect())
    }
}

/// Softmax of log scores.
pub(crate) fn normalize_log(log_scores: &[f64]) -> Vec<f64> {
    let max = log_scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = log_scores.iter().map(|s| (s - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Predict the argmax label and the per-class score map. Ties break toward
/// the earlier label in canonical order.
pub fn predict(
    model: &TrainedModel,
    v: &FeatureVector,
) -> Result<(MergedLabel, BTreeMap<String, f64>)> {
    let raw = model.raw_scores(v)?;
    let mut best = 0;
    for (i, s) in raw.iter().enumerate() {
        if *s > raw[best] {
            best = i;
        }
    }
    Ok((model.label_set[best], model.score_map(v)?))
}

/// Persist a model as versioned JSON.
pub fn save_model(model: &TrainedModel, path: &Path) -> Result<()> {
    let json = serde_json::to_string_pretty(model)?;
    std::fs::write(path, json).map_err(|e| Error::io(path, e))
}

/// Load a model saved by [`save_model`]; predictions round-trip bit-exactly.
pub fn load_model(path: &Path) -> Result<TrainedModel> {
    let json = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&json)?)
}

/// Anything that can fit a classifier on labelled vectors. Implemented by
/// [`AlgoConfig`] for the real algorithms and by test baselines.
pub trait Trainer {
    fn fit(&self, data: &[(FeatureVector, MergedLabel)]) -> Result<Box<dyn Predictor>>;
}

/// Anything that can label a vector.
pub trait Predictor {
    fn predict_label(&self, v: &FeatureVector) -> Result<MergedLabel>;
}

impl Predictor for TrainedModel {
    fn predict_label(&self, v: &FeatureVector) -> Result<MergedLabel> {
        let raw = self.raw_scores(v)?;
        let mut best = 0;
        for (i, s) in raw.iter().enumerate() {
            if *s > raw[best] {
                best = i;
            }
        }
        Ok(self.label_set[best])
    }
}

/// An algorithm plus hyperparameters, usable as a [`Trainer`].
#[derive(Debug, Clone)]
pub struct AlgoConfig {
    pub algorithm: Algorithm,
    pub hyperparams: Hyperparams,
}

impl Trainer for AlgoConfig {
    fn fit(&self, data: &[(FeatureVector, MergedLabel)]) -> Result<Box<dyn Predictor>> {
        Ok(Box::new(train(self.algorithm, &self.hyperparams, data)?))
    }
}

/// A baseline that always predicts the most frequent training label (ties
/// toward canonical order).
#[derive(Debug, Clone, Copy)]
pub struct MajorityTrainer;

struct MajorityModel {
    label: MergedLabel,
}

impl Predictor for MajorityModel {
    fn predict_label(&self, _v: &FeatureVector) -> Result<MergedLabel> {
        Ok(self.label)
    }
}

impl Trainer for MajorityTrainer {
    fn fit(&self, data: &[(FeatureVector, MergedLabel)]) -> Result<Box<dyn Predictor>> {
        if data.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        let mut counts: BTreeMap<MergedLabel, usize> = BTreeMap::new();
        for (_, l) in data {
            *counts.entry(*l).or_insert(0) += 1;
        }
        let label = *counts
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
            .map(|(l, _)| l)
            .expect("non-empty");
        Ok(Box::new(MajorityModel { label }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labels::MergedReason;

    fn vec_of(dim: usize, entries: &[(u32, f64)]) -> FeatureVector {
        FeatureVector {
            dim,
            entries: entries.to_vec(),
        }
    }

    fn lim() -> MergedLabel {
        MergedLabel::Reason(MergedReason::Limitation)
    }
    fn dep() -> MergedLabel {
        MergedLabel::Reason(MergedReason::Dependency)
    }

    /// 4-document toy corpus, two classes with disjoint vocabularies over a
    /// 4-term space.
    fn toy_corpus() -> Vec<(FeatureVector, MergedLabel)> {
        vec![
            (vec_of(4, &[(0, 2.0), (1, 1.0)]), lim()),
            (vec_of(4, &[(0, 1.0), (1, 1.0)]), lim()),
            (vec_of(4, &[(2, 2.0), (3, 1.0)]), dep()),
            (vec_of(4, &[(2, 1.0), (3, 1.0)]), dep()),
        ]
    }

    #[test]
    fn nb_matches_closed_form_oracle() {
        let model = train(Algorithm::NaiveBayes, &Hyperparams::default(), &toy_corpus()).unwrap();
        // Hand-derived: each class holds 5 term occurrences; with alpha=1
        // and |V|=4, theta = (count+1)/(5+4).
        let expected_lim: [f64; 4] = [4.0 / 9.0, 3.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0];
        let expected_dep: [f64; 4] = [1.0 / 9.0, 1.0 / 9.0, 4.0 / 9.0, 3.0 / 9.0];
        let ModelParams::NaiveBayes {
            log_priors,
            log_likelihoods,
            shift,
        } = &model.params
        else {
            panic!("expected NB params")
        };
        assert_eq!(*shift, 0.0);
        assert!((log_priors[0] - 0.5f64.ln()).abs() < 1e-9);
        assert!((log_priors[1] - 0.5f64.ln()).abs() < 1e-9);
        for t in 0..4 {
            assert!((log_likelihoods[0][t] - expected_lim[t].ln()).abs() < 1e-9);
            assert!((log_likelihoods[1][t] - expected_dep[t].ln()).abs() < 1e-9);
        }
        // Held-out doc with only class-Limitation terms.
        let doc = vec_of(4, &[(0, 1.0), (1, 1.0)]);
        let (label, scores) = predict(&model, &doc).unwrap();
        assert_eq!(label, lim());
        // Posterior = 12/13 by hand: lpA - lpB = ln(4/9 * 3/9) - ln(1/81) = ln 12.
        let p = scores["Limitation"];
        assert!((p - 12.0 / 13.0).abs() < 1e-9);
        // Log-posterior oracle.
        let raw = model.raw_scores(&doc).unwrap();
        let expected_lp_lim = 0.5f64.ln() + (4.0 / 9.0f64).ln() + (3.0 / 9.0f64).ln();
        let expected_lp_dep = 0.5f64.ln() + (1.0 / 9.0f64).ln() + (1.0 / 9.0f64).ln();
        assert!((raw[0] - expected_lp_lim).abs() < 1e-9);
        assert!((raw[1] - expected_lp_dep).abs() < 1e-9);
    }

    #[test]
    fn nb_scores_sum_to_one() {
        let model = train(Algorithm::NaiveBayes, &Hyperparams::default(), &toy_corpus()).unwrap();
        let (_, scores) = predict(&model, &vec_of(4, &[(0, 3.0), (2, 1.0)])).unwrap();
        let total: f64 = scores.values().sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn nb_zero_vector_prefers_max_prior() {
        // 3 Limitation docs vs 1 Dependency doc.
        let mut data = toy_corpus();
        data.push((vec_of(4, &[(0, 1.0)]), lim()));
        data.remove(3);
        let model = train(Algorithm::NaiveBayes, &Hyperparams::default(), &data).unwrap();
        let (label, _) = predict(&model, &FeatureVector::zero(4)).unwrap();
        assert_eq!(label, lim());
    }

    #[test]
    fn nb_argmax_invariant_under_count_scaling() {
        let data = toy_corpus();
        let scaled: Vec<(FeatureVector, MergedLabel)> = data
            .iter()
            .map(|(v, l)| {
                let entries = v.entries.iter().map(|(i, x)| (*i, x * 3.0)).collect();
                (
                    FeatureVector {
                        dim: v.dim,
                        entries,
                    },
                    *l,
                )
            })
            .collect();
        let m1 = train(Algorithm::NaiveBayes, &Hyperparams::default(), &data).unwrap();
        let m2 = train(Algorithm::NaiveBayes, &Hyperparams::default(), &scaled).unwrap();
        for (v, _) in &data {
            let (a, _) = predict(&m1, v).unwrap();
            let (b, _) = predict(&m2, v).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn nb_handles_negative_features_by_shifting() {
        let data = vec![
            (vec_of(2, &[(0, -1.0)]), lim()),
            (vec_of(2, &[(0, -0.5)]), lim()),
            (vec_of(2, &[(1, 2.0)]), dep()),
            (vec_of(2, &[(1, 1.0)]), dep()),
        ];
        let model = train(Algorithm::NaiveBayes, &Hyperparams::default(), &data).unwrap();
        let ModelParams::NaiveBayes { shift, .. } = &model.params else {
            panic!()
        };
        assert_eq!(*shift, 1.0);
        predict(&model, &vec_of(2, &[(0, -1.0)])).unwrap();
    }

    #[test]
    fn knn_k1_recovers_training_label() {
        let data = toy_corpus();
        let model = train(
            Algorithm::Knn,
            &Hyperparams {
                k: 1,
                ..Default::default()
            },
            &data,
        )
        .unwrap();
        for (v, l) in &data {
            let (label, _) = predict(&model, v).unwrap();
            assert_eq!(label, *l);
        }
    }

    #[test]
    fn single_class_is_rejected() {
        let data = vec![
            (vec_of(2, &[(0, 1.0)]), lim()),
            (vec_of(2, &[(1, 1.0)]), lim()),
        ];
        for algo in Algorithm::ALL {
            assert!(matches!(
                train(algo, &Hyperparams::default(), &data),
                Err(Error::SingleClass)
            ));
        }
    }

    #[test]
    fn empty_training_set_is_rejected() {
        assert!(matches!(
            train(Algorithm::NaiveBayes, &Hyperparams::default(), &[]),
            Err(Error::EmptyTrainingSet)
        ));
    }

    #[test]
    fn invalid_hyperparams_are_rejected() {
        let data = toy_corpus();
        let bad_alpha = Hyperparams {
            alpha: 0.0,
            ..Default::default()
        };
        assert!(matches!(
            train(Algorithm::NaiveBayes, &bad_alpha, &data),
            Err(Error::InvalidHyperparam(_))
        ));
        let bad_k = Hyperparams {
            k: 99,
            ..Default::default()
        };
        assert!(matches!(
            train(Algorithm::Knn, &bad_k, &data),
            Err(Error::InvalidHyperparam(_))
        ));
        let bad_c = Hyperparams {
            c: -1.0,
            ..Default::default()
        };
        assert!(matches!(
            train(Algorithm::Svm, &bad_c, &data),
            Err(Error::InvalidHyperparam(_))
        ));
    }

    #[test]
    fn wrong_dimension_is_rejected() {
        let model = train(Algorithm::NaiveBayes, &Hyperparams::default(), &toy_corpus()).unwrap();
        match predict(&model, &FeatureVector::zero(7)) {
            Err(Error::DimensionMismatch {
                expected: 4,
                got: 7,
            }) => {}
            other => panic!("expected DimensionMismatch, got {other:?}"),
        }
    }

    #[test]
    fn svm_separates_toy_corpus() {
        let model = train(Algorithm::Svm, &Hyperparams::default(), &toy_corpus()).unwrap();
        for (v, l) in &toy_corpus() {
            let (label, _) = predict(&model, v).unwrap();
            assert_eq!(label, *l);
        }
    }

    #[test]
    fn svm_epoch_losses_are_non_increasing() {
        let data = toy_corpus();
        let y = vec![0usize, 0, 1, 1];
        let fitted = super::svm::fit(&data, &y, 2, 4, &Hyperparams::default());
        for pair in fitted.epoch_best_loss.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-12);
        }
    }

    #[test]
    fn save_load_round_trips_predictions() {
        use rand::prelude::*;
        let dir = tempfile::tempdir().unwrap();
        let hp = Hyperparams {
            k: 3,
            ..Default::default()
        };
        for algo in Algorithm::ALL {
            let model = train(algo, &hp, &toy_corpus()).unwrap();
            let path = dir.path().join(format!("{}.json", algo.name()));
            save_model(&model, &path).unwrap();
            let loaded = load_model(&path).unwrap();
            assert_eq!(model, loaded);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
            for _ in 0..100 {
                let mut entries: Vec<(u32, f64)> = Vec::new();
                for i in 0..4u32 {
                    if rng.random_bool(0.7) {
                        entries.push((i, rng.random_range(-3.0..3.0)));
                    }
                }
                let v = FeatureVector { dim: 4, entries };
                let a = model.raw_scores(&v).unwrap();
                let b = loaded.raw_scores(&v).unwrap();
                assert_eq!(a, b, "algorithm {}", algo.name());
            }
        }
    }
}
