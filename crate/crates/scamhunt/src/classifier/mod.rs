//! Binary scam/normal text classification over normalized list text:
//! balanced sampling with scam oversampling, TF-IDF + logistic regression,
//! stratified k-fold cross-validation, and held-out evaluation.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

mod eval;
mod features;
mod model;

pub use eval::{build_training_split, cross_validate, evaluate, stratified_folds, Metrics};
pub use features::{tokenize, vectorize, Vocabulary};
pub use model::{train, ClassifierModel, Prediction, TrainConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Scam,
    Normal,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Scam => f.write_str("scam"),
            Label::Normal => f.write_str("normal"),
        }
    }
}

/// One labeled, textprep-filtered example.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub text: String,
    pub label: Label,
}

#[derive(Debug, Error)]
pub enum ClassifierError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("test set is empty")]
    EmptyTestSet,
    #[error("training set contains a single class")]
    SingleClass,
    #[error("non-finite loss at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },
    #[error("too few {label} examples: need {needed}, have {available}")]
    TooFewExamples { label: Label, needed: usize, available: usize },
    #[error("fold count must be at least 2, got {0}")]
    BadFoldCount(usize),
    #[error("class {label} cannot fill {fold_count} folds")]
    ClassMissingFromFold { label: Label, fold_count: usize },
    #[error("io error: {0}")]
    Io(String),
}

/// Read a labeled corpus from JSONL lines of `{"text": ..., "label": ...}`.
pub fn read_labeled_jsonl(content: &str) -> Result<Vec<LabeledExample>, ClassifierError> {
    content
        .lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(i, line)| {
            serde_json::from_str(line)
                .map_err(|e| ClassifierError::Io(format!("line {}: {e}", i + 1)))
        })
        .collect()
}
