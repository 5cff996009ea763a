use std::collections::HashSet;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::logistic::{train_logistic, LabeledExample, LogisticModel, TrainConfig};
use crate::corpus::Article;
use crate::error::{Error, Result};
use crate::textvec::{tokenize_with, TfIdfModel, TokenizerConfig};
use crate::util::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BootstrapConfig {
    /// Non-keyword articles scoring strictly above this are expanded candidates.
    pub expansion_threshold: f64,
    pub tokenizer: TokenizerConfig,
    pub train: TrainConfig,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            expansion_threshold: 0.5,
            tokenizer: TokenizerConfig::default(),
            train: TrainConfig::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BootstrapOutcome {
    /// Articles that contained the keyword, in input order.
    pub positives: Vec<String>,
    /// Sampled negatives, in sample order.
    pub negatives: Vec<String>,
    /// Articles without the keyword that the model scores above threshold.
    pub expanded: Vec<String>,
    pub model: LogisticModel,
    pub space: TfIdfModel,
    pub n_pos: usize,
    pub n_neg: usize,
}

impl BootstrapOutcome {
    pub fn score(&self, text: &str) -> f64 {
        self.model.predict_proba(&self.space.transform(text))
    }
}

/// Removes every occurrence of the keyword token sequence. Returns the
/// remaining tokens and whether anything was removed.
pub fn delete_keyword(tokens: &[String], keyword: &[String]) -> (Vec<String>, bool) {
    if keyword.is_empty() {
        return (tokens.to_vec(), false);
    }
    let mut out = Vec::with_capacity(tokens.len());
    let mut found = false;
    let mut i = 0;
    while i < tokens.len() {
        if tokens[i..].starts_with(keyword) {
            found = true;
            i += keyword.len();
        } else {
            out.push(tokens[i].clone());
            i += 1;
        }
    }
    (out, found)
}

/// Trains a first classifier from keyword matches: articles containing the
/// keyword (with it deleted) are positives, a seeded sample of the rest are
/// negatives.
pub fn bootstrap_from_keyword(
    articles: &[Article],
    keyword: &str,
    negative_ratio: f64,
    config: &BootstrapConfig,
) -> Result<BootstrapOutcome> {
    if !(negative_ratio > 0.0) || !negative_ratio.is_finite() {
        return Err(Error::invalid("negative_ratio must be positive"));
    }
    let kw = tokenize_with(keyword, config.tokenizer);
    if kw.is_empty() {
        return Err(Error::KeywordAbsent(keyword.to_string()));
    }

    let mut docs = Vec::with_capacity(articles.len());
    let mut matched = Vec::with_capacity(articles.len());
    for a in articles {
        let (toks, hit) = delete_keyword(&tokenize_with(&a.text(), config.tokenizer), &kw);
        docs.push(toks);
        matched.push(hit);
    }
    let pos: Vec<usize> = (0..articles.len()).filter(|&i| matched[i]).collect();
    if pos.is_empty() {
        return Err(Error::KeywordAbsent(keyword.to_string()));
    }
    let mut pool: Vec<usize> = (0..articles.len()).filter(|&i| !matched[i]).collect();
    pool.shuffle(&mut rng(config.train.seed));
    let n_neg = ((negative_ratio * pos.len() as f64).round() as usize).min(pool.len());
    let neg = &pool[..n_neg];
    if neg.is_empty() {
        return Err(Error::SingleClass);
    }

    let space = TfIdfModel::fit_tokens(&docs, config.tokenizer)?;
    let examples: Vec<LabeledExample> = pos
        .iter()
        .map(|&i| (i, true))
        .chain(neg.iter().map(|&i| (i, false)))
        .map(|(i, label)| LabeledExample::new(articles[i].id.clone(), space.transform_tokens(&docs[i]), label))
        .collect();
    let model = train_logistic(&examples, Some(space.dim()), config.train)?;

    let expanded = (0..articles.len())
        .filter(|&i| !matched[i])
        .filter(|&i| model.predict_proba(&space.transform_tokens(&docs[i])) > config.expansion_threshold)
        .map(|i| articles[i].id.clone())
        .collect();
    let positives = pos.iter().map(|&i| articles[i].id.clone()).collect::<Vec<_>>();
    debug_assert_eq!(positives.iter().collect::<HashSet<_>>().len(), positives.len());
    Ok(BootstrapOutcome {
        n_pos: positives.len(),
        n_neg,
        positives,
        negatives: neg.iter().map(|&i| articles[i].id.clone()).collect(),
        expanded,
        model,
        space,
    })
}
