//! Evaluation: confusion-matrix metrics, ten-round stratified shuffle
//! validation, inter-rater agreement, and representative sample sizing.

use std::collections::BTreeMap;
use std::hash::Hash;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labels::MergedLabel;
use crate::model::Trainer;
use crate::text::FeatureVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub label: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Number of true instances (confusion row sum).
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub per_class: Vec<ClassMetrics>,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub weighted_precision: f64,
    pub weighted_recall: f64,
    pub weighted_f1: f64,
}

/// Per-class precision/recall/F1 plus macro and support-weighted averages.
///
/// Rows of `confusion` are actual classes, columns are predictions. A class
/// never predicted has precision 0 by convention; F1 is 0 when P + R = 0.
pub fn metrics(confusion: &[Vec<usize>], labels: &[String]) -> Result<MetricsSummary> {
    let n = confusion.len();
    if confusion.iter().any(|row| row.len() != n) || labels.len() != n {
        return Err(Error::NonSquare);
    }
    let mut per_class = Vec::with_capacity(n);
    for c in 0..n {
        let tp = confusion[c][c];
        let row_sum: usize = confusion[c].iter().sum();
        let col_sum: usize = confusion.iter().map(|row| row[c]).sum();
        let precision = if col_sum == 0 {
            0.0
        } else {
            tp as f64 / col_sum as f64
        };
        let recall = if row_sum == 0 {
            0.0
        } else {
            tp as f64 / row_sum as f64
        };
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        per_class.push(ClassMetrics {
            label: labels[c].clone(),
            precision,
            recall,
            f1,
            support: row_sum,
        });
    }
    let total_support: usize = per_class.iter().map(|m| m.support).sum();
    let k = n as f64;
    let macro_of = |f: fn(&ClassMetrics) -> f64| per_class.iter().map(f).sum::<f64>() / k;
    let weighted_of = |f: fn(&ClassMetrics) -> f64| {
        if total_support == 0 {
            0.0
        } else {
            per_class
                .iter()
                .map(|m| m.support as f64 * f(m))
                .sum::<f64>()
                / total_support as f64
        }
    };
    Ok(MetricsSummary {
        macro_precision: macro_of(|m| m.precision),
        macro_recall: macro_of(|m| m.recall),
        macro_f1: macro_of(|m| m.f1),
        weighted_precision: weighted_of(|m| m.precision),
        weighted_recall: weighted_of(|m| m.recall),
        weighted_f1: weighted_of(|m| m.f1),
        per_class,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundReport {
    pub round: usize,
    pub confusion: Vec<Vec<usize>>,
    pub metrics: MetricsSummary,
}

/// Ten-round (by default) stratified shuffle-split evaluation report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub seed: u64,
    pub rounds: usize,
    pub test_fraction: f64,
    pub labels: Vec<String>,
    /// Per-class and averaged metrics, averaged over rounds (per-class
    /// supports are summed).
    pub mean: MetricsSummary,
    /// Confusion matrix summed over rounds.
    pub confusion_total: Vec<Vec<usize>>,
    pub per_round: Vec<RoundReport>,
}

/// Stratified train/test split: per class, a seeded shuffle of its indices
/// with `clamp(round(fraction * n_c), 1, n_c - 1)` going to test. Test
/// class proportions land within one sample of the corpus proportions, and
/// every class stays represented in training.
fn stratified_split(
    labels: &[MergedLabel],
    test_fraction: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut by_class: BTreeMap<MergedLabel, Vec<usize>> = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        by_class.entry(*l).or_default().push(i);
    }
    for (label, idxs) in &by_class {
        if idxs.len() < 2 {
            return Err(Error::ClassTooSmall {
                label: label.name().to_string(),
            });
        }
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for idxs in by_class.values() {
        let mut shuffled = idxs.clone();
        shuffled.shuffle(rng);
        let n_c = shuffled.len();
        let n_test = ((test_fraction * n_c as f64).round() as usize).clamp(1, n_c - 1);
        test.extend_from_slice(&shuffled[..n_test]);
        train.extend_from_slice(&shuffled[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Repeated stratified random train/test splits (test sets may overlap
/// across rounds), reporting per-round metrics and their means.
pub fn cross_validate(
    trainer: &dyn Trainer,
    data: &[(FeatureVector, MergedLabel)],
    rounds: usize,
    test_fraction: f64,
    seed: u64,
) -> Result<EvalReport> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidFraction(test_fraction));
    }
    if data.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let mut label_set: Vec<MergedLabel> = data.iter().map(|(_, l)| *l).collect();
    label_set.sort();
    label_set.dedup();
    let label_names: Vec<String> = label_set.iter().map(|l| l.name().to_string()).collect();
    let labels: Vec<MergedLabel> = data.iter().map(|(_, l)| *l).collect();
    let n = label_set.len();

    let mut per_round = Vec::with_capacity(rounds);
    let mut confusion_total = vec![vec![0usize; n]; n];
    for round in 0..rounds {
        // Each round draws from its own derived stream, so rounds are
        // schedule-independent.
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ round as u64);
        let (train_idx, test_idx) = stratified_split(&labels, test_fraction, &mut rng)?;
        let train_data: Vec<(FeatureVector, MergedLabel)> =
            train_idx.iter().map(|&i| data[i].clone()).collect();
        let model = trainer.fit(&train_data)?;
        let mut confusion = vec![vec![0usize; n]; n];
        for &i in &test_idx {
            let (v, actual) = &data[i];
            let predicted = model.predict_label(v)?;
            let a = label_set.binary_search(actual).expect("known label");
            let p = label_set
                .binary_search(&predicted)
                .expect("prediction from label set");
            confusion[a][p] += 1;
        }
        for (ta, ra) in confusion_total.iter_mut().zip(&confusion) {
            for (t, v) in ta.iter_mut().zip(ra) {
                *t += v;
            }
        }
        let m = metrics(&confusion, &label_names)?;
        per_round.push(RoundReport {
            round,
            confusion,
            metrics: m,
        });
    }
    let mean = mean_summary(&per_round, &label_names);
    Ok(EvalReport {
        schema_version: 1,
        seed,
        rounds,
        test_fraction,
        labels: label_names,
        mean,
        confusion_total,
        per_round,
    })
}

fn mean_summary(rounds: &[RoundReport], labels: &[String]) -> MetricsSummary {
    let r = rounds.len().max(1) as f64;
    let per_class = labels
        .iter()
        .enumerate()
        .map(|(c, label)| ClassMetrics {
            label: label.clone(),
            precision: rounds.iter().map(|x| x.metrics.per_class[c].precision).sum::<f64>() / r,
            recall: rounds.iter().map(|x| x.metrics.per_class[c].recall).sum::<f64>() / r,
            f1: rounds.iter().map(|x| x.metrics.per_class[c].f1).sum::<f64>() / r,
            support: rounds.iter().map(|x| x.metrics.per_class[c].support).sum(),
        })
        .collect();
    MetricsSummary {
        per_class,
        macro_precision: rounds.iter().map(|x| x.metrics.macro_precision).sum::<f64>() / r,
        macro_recall: rounds.iter().map(|x| x.metrics.macro_recall).sum::<f64>() / r,
        macro_f1: rounds.iter().map(|x| x.metrics.macro_f1).sum::<f64>() / r,
        weighted_precision: rounds
            .iter()
            .map(|x| x.metrics.weighted_precision)
            .sum::<f64>()
            / r,
        weighted_recall: rounds.iter().map(|x| x.metrics.weighted_recall).sum::<f64>() / r,
        weighted_f1: rounds.iter().map(|x| x.metrics.weighted_f1).sum::<f64>() / r,
    }
}

/// Cohen's kappa between two label sequences: (p_o - p_e) / (1 - p_e).
pub fn cohen_kappa<L: Eq + Hash + Clone>(a: &[L], b: &[L]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = a.len() as f64;
    let mut count_a: std::collections::HashMap<&L, usize> = std::collections::HashMap::new();
    let mut count_b: std::collections::HashMap<&L, usize> = std::collections::HashMap::new();
    let mut agree = 0usize;
    for (x, y) in a.iter().zip(b) {
        *count_a.entry(x).or_insert(0) += 1;
        *count_b.entry(y).or_insert(0) += 1;
        if x == y {
            agree += 1;
        }
    }
    let p_o = agree as f64 / n;
    let p_e: f64 = count_a
        .iter()
        .map(|(l, &ca)| {
            let cb = count_b.get(l).copied().unwrap_or(0);
            (ca as f64 / n) * (cb as f64 / n)
        })
        .sum();
    if (1.0 - p_e).abs() < 1e-15 {
        // Both raters constant on the same label: perfect agreement.
        return Ok(1.0);
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}

/// Sample size for a proportion estimate at the given confidence and margin
/// of error, with finite population correction (maximum-variance p = 0.5).
pub fn representative_sample_size(
    population: u64,
    confidence: f64,
    margin: f64,
) -> Result<u64> {
    if population < 1 {
        return Err(Error::Domain("population must be >= 1".into()));
    }
    if !(margin > 0.0 && margin < 1.0) {
        return Err(Error::InvalidMargin(margin));
    }
    let z = z_value(confidence)?;
    let n0 = z * z * 0.25 / (margin * margin);
    let n = n0 / (1.0 + (n0 - 1.0) / population as f64);
    Ok(n.ceil() as u64)
}

fn z_value(confidence: f64) -> Result<f64> {
    let table = [(0.90, 1.645), (0.95, 1.960), (0.99, 2.576)];
    for (level, z) in table {
        if (confidence - level).abs() < 1e-9 {
            return Ok(z);
        }
    }
    Err(Error::UnsupportedConfidence(confidence))
}
