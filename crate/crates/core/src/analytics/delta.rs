use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::textvec::{word_probs, TokenizerConfig};

/// Scale applied to probability differences in reported tables.
pub const DELTA_SCALE: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaWord {
    pub word: String,
    pub delta: f64,
}

/// `(p(w | positive) - p(w | negative)) * 100` for every word seen in
/// either class, sorted by delta descending then word.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaWordTable {
    pub positive_label: String,
    pub negative_label: String,
    pub rows: Vec<DeltaWord>,
}

impl DeltaWordTable {
    pub fn sum(&self) -> f64 {
        self.rows.iter().map(|r| r.delta).sum()
    }

    pub fn get(&self, word: &str) -> Option<f64> {
        self.rows.iter().find(|r| r.word == word).map(|r| r.delta)
    }

    /// The `n` most positive rows followed by the `n` most negative, without
    /// repeating a row when the table is shorter than `2n`.
    pub fn extremes(&self, n: usize) -> Vec<&DeltaWord> {
        let len = self.rows.len();
        if 2 * n >= len {
            return self.rows.iter().collect();
        }
        self.rows[..n].iter().chain(&self.rows[len - n..]).collect()
    }
}

pub fn delta_words<S: AsRef<str>>(
    positive: &[S],
    negative: &[S],
    tokenizer: TokenizerConfig,
) -> Result<DeltaWordTable> {
    let pos = word_probs(positive, tokenizer).map_err(|_| Error::EmptyCorpus("positive class has no tokens"))?;
    let neg = word_probs(negative, tokenizer).map_err(|_| Error::EmptyCorpus("negative class has no tokens"))?;
    let words: BTreeSet<&String> = pos.probs.keys().chain(neg.probs.keys()).collect();
    let mut rows: Vec<DeltaWord> = words
        .into_iter()
        .map(|w| DeltaWord {
            word: w.clone(),
            delta: (pos.prob(w) - neg.prob(w)) * DELTA_SCALE,
        })
        .collect();
    rows.sort_by(|a, b| b.delta.total_cmp(&a.delta).then_with(|| a.word.cmp(&b.word)));
    Ok(DeltaWordTable {
        positive_label: "newsworthy".to_string(),
        negative_label: "not newsworthy".to_string(),
        rows,
    })
}
