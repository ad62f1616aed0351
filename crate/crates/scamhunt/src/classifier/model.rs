//! TF-IDF + logistic regression scam/normal model.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::features::{tokenize, vectorize, Vocabulary};
use super::{ClassifierError, Label, LabeledExample};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { epochs: 200, learning_rate: 0.1, l2: 1e-4, seed: 0 }
    }
}

impl TrainConfig {
    pub fn with_seed(seed: u64) -> Self {
        TrainConfig { seed, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: Label,
    pub score: f64,
}

/// A trained model: vocabulary, per-feature idf and weight, bias, decision
/// threshold, plus the seed and config it was trained with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierModel {
    pub vocabulary: Vocabulary,
    pub idf: Vec<f64>,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub threshold: f64,
    pub seed: u64,
    pub config: TrainConfig,
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

// numerically stable binary cross-entropy term
fn log_loss(z: f64, y: f64) -> f64 {
    z.max(0.0) - z * y + (-z.abs()).exp().ln_1p()
}

/// Fit logistic regression over TF-IDF features with plain SGD.
/// Deterministic for a fixed seed; the decision threshold defaults to 0.5.
pub fn train(examples: &[LabeledExample], config: &TrainConfig) -> Result<ClassifierModel, ClassifierError> {
    if examples.is_empty() {
        return Err(ClassifierError::EmptyTrainingSet);
    }
    let scam = examples.iter().filter(|e| e.label == Label::Scam).count();
    if scam == 0 || scam == examples.len() {
        return Err(ClassifierError::SingleClass);
    }

    let docs: Vec<Vec<String>> = examples.iter().map(|e| tokenize(&e.text)).collect();
    let vocabulary = Vocabulary::build(&docs);
    let idf = vocabulary.idf_vector();
    let vectors: Vec<Vec<(usize, f64)>> =
        docs.iter().map(|doc| vectorize(doc, &vocabulary, &idf)).collect();
    let targets: Vec<f64> = examples
        .iter()
        .map(|e| if e.label == Label::Scam { 1.0 } else { 0.0 })
        .collect();

    let mut weights = vec![0.0_f64; vocabulary.len()];
    let mut bias = 0.0_f64;
    let mut order: Vec<usize> = (0..examples.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for &i in &order {
            let z = bias
                + vectors[i]
                    .iter()
                    .map(|&(j, v)| weights[j] * v)
                    .sum::<f64>();
            epoch_loss += log_loss(z, targets[i]);
            let gradient = sigmoid(z) - targets[i];
            for &(j, v) in &vectors[i] {
                weights[j] -= config.learning_rate * (gradient * v + config.l2 * weights[j]);
            }
            bias -= config.learning_rate * gradient;
        }
        if !epoch_loss.is_finite() {
            return Err(ClassifierError::NonFiniteLoss { epoch });
        }
    }

    Ok(ClassifierModel {
        vocabulary,
        idf,
        weights,
        bias,
        threshold: 0.5,
        seed: config.seed,
        config: *config,
    })
}

impl ClassifierModel {
    /// Score normalized text; label is scam iff score >= threshold.
    pub fn predict(&self, text: &str) -> Prediction {
        let tokens = tokenize(text);
        let vector = vectorize(&tokens, &self.vocabulary, &self.idf);
        let z = self.bias + vector.iter().map(|&(j, v)| self.weights[j] * v).sum::<f64>();
        let score = sigmoid(z);
        let label = if score >= self.threshold { Label::Scam } else { Label::Normal };
        Prediction { label, score }
    }

    pub fn save(&self, path: &Path) -> Result<(), ClassifierError> {
        let json = serde_json::to_string_pretty(self).expect("model serializes");
        std::fs::write(path, json).map_err(|e| ClassifierError::Io(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ClassifierError> {
        let content =
            std::fs::read_to_string(path).map_err(|e| ClassifierError::Io(e.to_string()))?;
        serde_json::from_str(&content).map_err(|e| ClassifierError::Io(e.to_string()))
    }
}
