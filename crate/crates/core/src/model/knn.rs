//! k-nearest neighbors over cosine distance.

use crate::labels::MergedLabel;
use crate::text::FeatureVector;

use super::ModelParams;

fn normalized(v: &FeatureVector) -> FeatureVector {
    let norm = v.norm();
    if norm == 0.0 {
        return v.clone();
    }
    FeatureVector {
        dim: v.dim,
        entries: v.entries.iter().map(|(i, x)| (*i, x / norm)).collect(),
    }
}

pub(super) fn fit(data: &[(FeatureVector, MergedLabel)], y: &[usize], k: usize) -> ModelParams {
    ModelParams::Knn {
        vectors: data.iter().map(|(v, _)| normalized(v)).collect(),
        labels: y.to_vec(),
        k,
    }
}

/// Fraction of the k nearest stored vectors voting for each class.
/// Similarity ties break toward the lower stored index.
pub(super) fn vote_fractions(
    vectors: &[FeatureVector],
    labels: &[usize],
    k: usize,
    n_classes: usize,
    v: &FeatureVector,
) -> Vec<f64> {
    let query = normalized(v);
    let mut sims: Vec<(f64, usize)> = vectors
        .iter()
        .enumerate()
        .map(|(i, stored)| (query.dot(stored), i))
        .collect();
    sims.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    let mut votes = vec![0.0f64; n_classes];
    for (_, idx) in sims.iter().take(k) {
        votes[labels[*idx]] += 1.0;
    }
    let k = k as f64;
    votes.iter_mut().for_each(|x| *x /= k);
    votes
}
