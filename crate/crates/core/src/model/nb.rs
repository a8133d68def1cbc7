//! Multinomial Naive Bayes with Laplace smoothing.

use crate::labels::MergedLabel;
use crate::text::FeatureVector;

use super::ModelParams;

/// Fit class priors and smoothed term likelihoods. Feature values act as
/// term counts; if any training value is negative, all present entries are
/// shifted by a constant so the count interpretation survives.
pub(super) fn fit(
    data: &[(FeatureVector, MergedLabel)],
    y: &[usize],
    n_classes: usize,
    dim: usize,
    alpha: f64,
) -> ModelParams {
    let min_value = data
        .iter()
        .flat_map(|(v, _)| v.entries.iter().map(|(_, x)| *x))
        .fold(0.0f64, f64::min);
    let shift = -min_value.min(0.0);

    let mut class_counts = vec![0usize; n_classes];
    let mut term_counts = vec![vec![0.0f64; dim]; n_classes];
    let mut totals = vec![0.0f64; n_classes];
    for ((v, _), &c) in data.iter().zip(y) {
        class_counts[c] += 1;
        for (i, x) in &v.entries {
            let count = x + shift;
            term_counts[c][*i as usize] += count;
            totals[c] += count;
        }
    }
    let n = data.len() as f64;
    let log_priors = class_counts
        .iter()
        .map(|&c| (c as f64 / n).ln())
        .collect();
    let log_likelihoods = (0..n_classes)
        .map(|c| {
            let denom = totals[c] + alpha * dim as f64;
            term_counts[c]
                .iter()
                .map(|&count| ((count + alpha) / denom).ln())
                .collect()
        })
        .collect();
    ModelParams::NaiveBayes {
        log_priors,
        log_likelihoods,
        shift,
    }
}

/// ln P(class) + sum over present terms of count * ln P(term | class).
pub(super) fn log_posteriors(
    log_priors: &[f64],
    log_likelihoods: &[Vec<f64>],
    shift: f64,
    v: &FeatureVector,
) -> Vec<f64> {
    log_priors
        .iter()
        .enumerate()
        .map(|(c, prior)| {
            let mut score = *prior;
            for (i, x) in &v.entries {
                score += (x + shift) * log_likelihoods[c][*i as usize];
            }
            score
        })
        .collect()
}
