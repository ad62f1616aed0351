//! Training-set construction, evaluation metrics, and k-fold cross-validation.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::{train, ClassifierModel, TrainConfig};
use super::{ClassifierError, Label, LabeledExample};

/// Confusion counts and derived rates, with scam as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub true_pos: u64,
    pub false_pos: u64,
    pub true_neg: u64,
    pub false_neg: u64,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Metrics {
    pub fn from_counts(true_pos: u64, false_pos: u64, true_neg: u64, false_neg: u64) -> Self {
        let total = (true_pos + false_pos + true_neg + false_neg) as f64;
        let accuracy = if total > 0.0 { (true_pos + true_neg) as f64 / total } else { 0.0 };
        let precision = if true_pos + false_pos > 0 {
            true_pos as f64 / (true_pos + false_pos) as f64
        } else {
            0.0
        };
        let recall = if true_pos + false_neg > 0 {
            true_pos as f64 / (true_pos + false_neg) as f64
        } else {
            0.0
        };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Metrics { true_pos, false_pos, true_neg, false_neg, accuracy, precision, recall, f1 }
    }

    /// Fold summary: counts are summed, rates are arithmetic means.
    pub fn mean_of(folds: &[Metrics]) -> Metrics {
        let n = folds.len().max(1) as f64;
        Metrics {
            true_pos: folds.iter().map(|m| m.true_pos).sum(),
            false_pos: folds.iter().map(|m| m.false_pos).sum(),
            true_neg: folds.iter().map(|m| m.true_neg).sum(),
            false_neg: folds.iter().map(|m| m.false_neg).sum(),
            accuracy: folds.iter().map(|m| m.accuracy).sum::<f64>() / n,
            precision: folds.iter().map(|m| m.precision).sum::<f64>() / n,
            recall: folds.iter().map(|m| m.recall).sum::<f64>() / n,
            f1: folds.iter().map(|m| m.f1).sum::<f64>() / n,
        }
    }
}

/// Sample a balanced training set and keep the remainder as an untouched,
/// imbalanced test set.
///
/// `n_scam` picks how many unique scam examples enter training; `None`
/// derives the largest count that preserves the 1 scam : 2 normal draw,
/// capped at 300. Each selected scam example is counted twice (oversampling
/// by exact duplication), so the effective training classes balance out.
pub fn build_training_split(
    labeled: &[LabeledExample],
    seed: u64,
    n_scam: Option<usize>,
) -> Result<(Vec<LabeledExample>, Vec<LabeledExample>), ClassifierError> {
    let scam_idx: Vec<usize> =
        (0..labeled.len()).filter(|&i| labeled[i].label == Label::Scam).collect();
    let normal_idx: Vec<usize> =
        (0..labeled.len()).filter(|&i| labeled[i].label == Label::Normal).collect();

    let n = match n_scam {
        Some(n) => n,
        None => 300.min(scam_idx.len()).min(normal_idx.len() / 2),
    };
    if n == 0 || scam_idx.len() < n {
        return Err(ClassifierError::TooFewExamples {
            label: Label::Scam,
            needed: n.max(1),
            available: scam_idx.len(),
        });
    }
    if normal_idx.len() < 2 * n {
        return Err(ClassifierError::TooFewExamples {
            label: Label::Normal,
            needed: 2 * n,
            available: normal_idx.len(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scam_pool = scam_idx.clone();
    let mut normal_pool = normal_idx.clone();
    scam_pool.shuffle(&mut rng);
    normal_pool.shuffle(&mut rng);

    let chosen_scam = &scam_pool[..n];
    let chosen_normal = &normal_pool[..2 * n];

    let mut train: Vec<LabeledExample> = Vec::with_capacity(4 * n);
    for &i in chosen_scam {
        train.push(labeled[i].clone());
        train.push(labeled[i].clone()); // counted twice
    }
    for &i in chosen_normal {
        train.push(labeled[i].clone());
    }
    train.shuffle(&mut rng);

    let mut in_train = vec![false; labeled.len()];
    for &i in chosen_scam.iter().chain(chosen_normal.iter()) {
        in_train[i] = true;
    }
    let test: Vec<LabeledExample> =
        (0..labeled.len()).filter(|&i| !in_train[i]).map(|i| labeled[i].clone()).collect();

    Ok((train, test))
}

/// Confusion-matrix evaluation of a trained model on held-out examples.
pub fn evaluate(model: &ClassifierModel, test: &[LabeledExample]) -> Result<Metrics, ClassifierError> {
    if test.is_empty() {
        return Err(ClassifierError::EmptyTestSet);
    }
    let (mut tp, mut fp, mut tn, mut fn_) = (0u64, 0u64, 0u64, 0u64);
    for example in test {
        let predicted = model.predict(&example.text).label;
        match (example.label, predicted) {
            (Label::Scam, Label::Scam) => tp += 1,
            (Label::Normal, Label::Scam) => fp += 1,
            (Label::Normal, Label::Normal) => tn += 1,
            (Label::Scam, Label::Normal) => fn_ += 1,
        }
    }
    Ok(Metrics::from_counts(tp, fp, tn, fn_))
}

/// Deal each class round-robin into k folds after a seeded shuffle.
/// Every fold ends up with both classes or the call fails.
pub fn stratified_folds(
    labeled: &[LabeledExample],
    k: usize,
    seed: u64,
) -> Result<Vec<Vec<usize>>, ClassifierError> {
    if k < 2 {
        return Err(ClassifierError::BadFoldCount(k));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds: Vec<Vec<usize>> = vec![Vec::new(); k];
    for label in [Label::Scam, Label::Normal] {
        let mut class_idx: Vec<usize> =
            (0..labeled.len()).filter(|&i| labeled[i].label == label).collect();
        if class_idx.len() < k {
            return Err(ClassifierError::ClassMissingFromFold { label, fold_count: k });
        }
        class_idx.shuffle(&mut rng);
        for (pos, idx) in class_idx.into_iter().enumerate() {
            folds[pos % k].push(idx);
        }
    }
    Ok(folds)
}

/// Stratified k-fold cross-validation; the vocabulary is rebuilt per fold
/// from the training folds alone. Returns mean metrics over folds.
pub fn cross_validate(
    labeled: &[LabeledExample],
    k: usize,
    config: &TrainConfig,
    seed: u64,
) -> Result<Metrics, ClassifierError> {
    let folds = stratified_folds(labeled, k, seed)?;
    let mut fold_metrics = Vec::with_capacity(k);
    for held_out in &folds {
        let held: std::collections::HashSet<usize> = held_out.iter().copied().collect();
        let train_set: Vec<LabeledExample> = (0..labeled.len())
            .filter(|i| !held.contains(i))
            .map(|i| labeled[i].clone())
            .collect();
        let test_set: Vec<LabeledExample> =
            held_out.iter().map(|&i| labeled[i].clone()).collect();
        let model = train(&train_set, config)?;
        fold_metrics.push(evaluate(&model, &test_set)?);
    }
    Ok(Metrics::mean_of(&fold_metrics))
}
