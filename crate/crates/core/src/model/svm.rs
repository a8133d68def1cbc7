//! Linear one-vs-rest SVM trained by deterministic subgradient descent.
//!
//! Per-sample Pegasos-style steps over a seeded shuffle, a fixed number of
//! epochs. Subgradient steps are not monotone, so the returned weights are
//! the best iterate by objective value measured at epoch ends.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::labels::MergedLabel;
use crate::text::FeatureVector;

use super::{Hyperparams, ModelParams};

pub(super) struct FittedSvm {
    pub params: ModelParams,
    /// Best objective so far, recorded at each epoch end (non-increasing).
    #[cfg_attr(not(test), allow(dead_code))]
    pub epoch_best_loss: Vec<f64>,
}

/// Hinge objective: 0.5 * ||w||^2 + C * sum of margins violated, totalled
/// over the one-vs-rest problems.
fn objective(
    weights: &[Vec<f64>],
    biases: &[f64],
    data: &[(FeatureVector, MergedLabel)],
    y: &[usize],
    c: f64,
) -> f64 {
    let mut total = 0.0;
    for (class, (w, b)) in weights.iter().zip(biases).enumerate() {
        total += 0.5 * w.iter().map(|x| x * x).sum::<f64>();
        for ((v, _), &label) in data.iter().zip(y) {
            let target = if label == class { 1.0 } else { -1.0 };
            let margin = target * (dot_dense(w, v) + b);
            if margin < 1.0 {
                total += c * (1.0 - margin);
            }
        }
    }
    total
}

fn dot_dense(w: &[f64], v: &FeatureVector) -> f64 {
    v.entries.iter().map(|(i, x)| w[*i as usize] * x).sum()
}

pub(super) fn fit(
    data: &[(FeatureVector, MergedLabel)],
    y: &[usize],
    n_classes: usize,
    dim: usize,
    hp: &Hyperparams,
) -> FittedSvm {
    let n = data.len();
    let lambda = 1.0 / (hp.c * n as f64);
    // Lazy scaling: true weights are `scale * base[class]`, so the
    // per-step shrink touches one scalar instead of every coordinate.
    let mut base = vec![vec![0.0f64; dim]; n_classes];
    let mut scale = 1.0f64;
    let mut biases = vec![0.0f64; n_classes];
    let materialize = |base: &[Vec<f64>], scale: f64| -> Vec<Vec<f64>> {
        base.iter()
            .map(|v| v.iter().map(|w| w * scale).collect())
            .collect()
    };
    let mut best_weights = materialize(&base, scale);
    let mut best_biases = biases.clone();
    let mut best_loss = objective(&best_weights, &biases, data, y, hp.c);
    let mut epoch_best_loss = Vec::with_capacity(hp.epochs);
    let mut rng = ChaCha8Rng::seed_from_u64(hp.seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut t = 0usize;
    for _ in 0..hp.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (lambda * (t + 1) as f64);
            let (v, _) = &data[i];
            let shrink = 1.0 - eta * lambda;
            let margins: Vec<f64> = (0..n_classes)
                .map(|class| {
                    let target = if y[i] == class { 1.0 } else { -1.0 };
                    target * (scale * dot_dense(&base[class], v) + biases[class])
                })
                .collect();
            scale *= shrink;
            if scale < 1e-9 {
                for row in base.iter_mut() {
                    for w in row.iter_mut() {
                        *w *= scale;
                    }
                }
                scale = 1.0;
            }
            for (class, margin) in margins.iter().enumerate() {
                if *margin < 1.0 {
                    let target = if y[i] == class { 1.0 } else { -1.0 };
                    for (idx, x) in &v.entries {
                        base[class][*idx as usize] += eta * target * x / scale;
                    }
                    // Bias is unregularized.
                    biases[class] += eta * target;
                }
            }
        }
        let weights = materialize(&base, scale);
        let loss = objective(&weights, &biases, data, y, hp.c);
        if loss < best_loss {
            best_loss = loss;
            best_weights = weights;
            best_biases = biases.clone();
        }
        epoch_best_loss.push(best_loss);
    }
    FittedSvm {
        params: ModelParams::Svm {
            weights: best_weights,
            biases: best_biases,
        },
        epoch_best_loss,
    }
}

/// w . x + b per class.
pub(super) fn decision_values(weights: &[Vec<f64>], biases: &[f64], v: &FeatureVector) -> Vec<f64> {
    weights
        .iter()
        .zip(biases)
        .map(|(w, b)| dot_dense(w, v) + b)
        .collect()
}
