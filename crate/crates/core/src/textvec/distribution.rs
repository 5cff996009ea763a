use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::tokenize::{tokenize_with, TokenizerConfig};
use crate::error::{Error, Result};

/// Empirical unigram distribution `p(w) = count(w) / total tokens`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordDistribution {
    pub label: Option<String>,
    pub probs: BTreeMap<String, f64>,
    pub total_tokens: usize,
}

impl WordDistribution {
    pub fn prob(&self, word: &str) -> f64 {
        self.probs.get(word).copied().unwrap_or(0.0)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }
}

pub fn word_probs<S: AsRef<str>>(documents: &[S], tokenizer: TokenizerConfig) -> Result<WordDistribution> {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut total = 0usize;
    for doc in documents {
        for tok in tokenize_with(doc.as_ref(), tokenizer) {
            *counts.entry(tok).or_insert(0) += 1;
            total += 1;
        }
    }
    if total == 0 {
        return Err(Error::EmptyCorpus("word distribution needs at least one token"));
    }
    let probs = counts
        .into_iter()
        .map(|(w, c)| (w, c as f64 / total as f64))
        .collect();
    Ok(WordDistribution {
        label: None,
        probs,
        total_tokens: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::collections::HashMap;

    #[test]
    fn hand_counts() {
        let d = word_probs(&["a a b"], TokenizerConfig::default()).unwrap();
        assert_relative_eq!(d.prob("a"), 2.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(d.prob("b"), 1.0 / 3.0, epsilon = 1e-15);
        assert_eq!(d.prob("c"), 0.0);
    }

    #[test]
    fn single_word() {
        let d = word_probs(&["housing"], TokenizerConfig::default()).unwrap();
        assert_eq!(d.prob("housing"), 1.0);
    }

    #[test]
    fn zero_tokens_is_an_error() {
        assert!(word_probs(&["", "  ...  "], TokenizerConfig::default()).is_err());
    }

    proptest! {
        #[test]
        fn matches_hash_count_oracle(docs in prop::collection::vec("[a-f ]{0,25}", 1..6)) {
            let mut oracle: HashMap<String, usize> = HashMap::new();
            let mut total = 0usize;
            for d in &docs {
                for w in d.split_whitespace() {
                    *oracle.entry(w.to_string()).or_default() += 1;
                    total += 1;
                }
            }
            match word_probs(&docs, TokenizerConfig::default()) {
                Ok(dist) => {
                    prop_assert_eq!(dist.probs.len(), oracle.len());
                    for (w, c) in oracle {
                        prop_assert_eq!(dist.prob(&w), c as f64 / total as f64);
                    }
                    let s: f64 = dist.probs.values().sum();
                    prop_assert!((s - 1.0).abs() < 1e-9);
                }
                Err(_) => prop_assert_eq!(total, 0),
            }
        }
    }
}
