//! Tokenization and TF-IDF featurization.

use std::collections::BTreeMap;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

// Alternation order matters: emoji shortcodes and dotted domain tokens are
// kept whole, everything else splits on non-alphanumeric boundaries.
static TOKEN: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r":[a-z0-9_+-]+:|[a-zA-Z0-9]+(?:\.[a-zA-Z0-9]+)+|[a-zA-Z0-9]+").unwrap()
});

/// Deterministic tokenizer over normalized text.
pub fn tokenize(text: &str) -> Vec<String> {
    TOKEN.find_iter(text).map(|m| m.as_str().to_string()).collect()
}

/// Token-to-feature-index map with document frequencies, built only from
/// training documents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vocabulary {
    index: BTreeMap<String, usize>,
    doc_freq: Vec<u32>,
    n_docs: u32,
}

impl Vocabulary {
    pub fn build(documents: &[Vec<String>]) -> Self {
        let mut df: BTreeMap<String, u32> = BTreeMap::new();
        for doc in documents {
            let unique: std::collections::BTreeSet<&String> = doc.iter().collect();
            for token in unique {
                *df.entry(token.clone()).or_insert(0) += 1;
            }
        }
        // dense indices in lexicographic token order, for stable model files
        let mut index = BTreeMap::new();
        let mut doc_freq = Vec::with_capacity(df.len());
        for (i, (token, freq)) in df.into_iter().enumerate() {
            index.insert(token, i);
            doc_freq.push(freq);
        }
        Vocabulary { index, doc_freq, n_docs: documents.len() as u32 }
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn tokens(&self) -> impl Iterator<Item = (&str, usize)> {
        self.index.iter().map(|(t, &i)| (t.as_str(), i))
    }

    /// Smoothed inverse document frequency per feature.
    pub fn idf_vector(&self) -> Vec<f64> {
        let n = self.n_docs as f64;
        self.doc_freq
            .iter()
            .map(|&df| ((1.0 + n) / (1.0 + df as f64)).ln() + 1.0)
            .collect()
    }
}

/// Sparse L2-normalized TF-IDF vector: (feature index, weight) pairs sorted
/// by index. Out-of-vocabulary tokens contribute nothing.
pub fn vectorize(tokens: &[String], vocab: &Vocabulary, idf: &[f64]) -> Vec<(usize, f64)> {
    let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
    for token in tokens {
        if let Some(i) = vocab.index_of(token) {
            *counts.entry(i).or_insert(0.0) += 1.0;
        }
    }
    let mut vec: Vec<(usize, f64)> = counts.into_iter().map(|(i, tf)| (i, tf * idf[i])).collect();
    let norm = vec.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        for (_, v) in &mut vec {
            *v /= norm;
        }
    }
    vec
}
