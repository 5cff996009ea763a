use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::util::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LdaConfig {
    pub k: usize,
    pub iterations: usize,
    /// Document-topic prior; `50 / k` when unset.
    pub alpha: Option<f64>,
    pub beta: f64,
    pub seed: u64,
}

impl Default for LdaConfig {
    fn default() -> Self {
        Self {
            k: 8,
            iterations: 200,
            alpha: None,
            beta: 0.01,
            seed: 0,
        }
    }
}

impl LdaConfig {
    pub fn alpha(&self) -> f64 {
        self.alpha.unwrap_or(50.0 / self.k as f64)
    }
}

/// Collapsed Gibbs state after the final sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicModel {
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub seed: u64,
    pub iterations: usize,
    pub vocabulary: Vec<String>,
    /// `k x V` counts.
    pub topic_word: Vec<Vec<u32>>,
    /// `D x k` counts.
    pub doc_topic: Vec<Vec<u32>>,
    pub topic_totals: Vec<u32>,
    /// Topic of every token, aligned with the input documents.
    pub assignments: Vec<Vec<usize>>,
}

impl TopicModel {
    pub fn n_tokens(&self) -> usize {
        self.assignments.iter().map(Vec::len).sum()
    }

    /// Checks every count matrix against the assignments and returns the
    /// token total seen in the topic-word matrix.
    pub fn conserved_tokens(&self) -> Option<usize> {
        let tw: usize = self.topic_word.iter().flatten().map(|&c| c as usize).sum();
        let dt: usize = self.doc_topic.iter().flatten().map(|&c| c as usize).sum();
        let tt: usize = self.topic_totals.iter().map(|&c| c as usize).sum();
        let per_doc_ok = self
            .doc_topic
            .iter()
            .zip(&self.assignments)
            .all(|(row, z)| row.iter().map(|&c| c as usize).sum::<usize>() == z.len());
        let per_topic_ok = self
            .topic_word
            .iter()
            .zip(&self.topic_totals)
            .all(|(row, &t)| row.iter().map(|&c| c as u64).sum::<u64>() == t as u64);
        (tw == dt && dt == tt && per_doc_ok && per_topic_ok).then_some(tw)
    }

    /// `p(word | topic)` under the posterior mean.
    pub fn word_prob(&self, topic: usize, word: usize) -> f64 {
        let v = self.vocabulary.len() as f64;
        (self.topic_word[topic][word] as f64 + self.beta) / (self.topic_totals[topic] as f64 + v * self.beta)
    }

    pub fn top_words(&self, topic: usize, m: usize) -> Vec<(String, f64)> {
        let mut words: Vec<(usize, u32)> = self.topic_word[topic].iter().copied().enumerate().collect();
        words.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| self.vocabulary[a.0].cmp(&self.vocabulary[b.0])));
        words
            .into_iter()
            .take(m)
            .map(|(w, _)| (self.vocabulary[w].clone(), self.word_prob(topic, w)))
            .collect()
    }

    /// Argmax of the document's topic counts; lowest topic id on ties.
    /// `None` for an empty document.
    pub fn dominant_topic(&self, doc: usize) -> Option<usize> {
        let row = &self.doc_topic[doc];
        if row.iter().all(|&c| c == 0) {
            return None;
        }
        row.iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(&a.0)))
            .map(|(t, _)| t)
    }
}

pub fn lda_fit(documents: &[Vec<String>], config: &LdaConfig) -> Result<TopicModel> {
    lda_fit_with(documents, config, |_, _| {})
}

/// As [`lda_fit`], calling `after_sweep(sweep, &state)` after every sweep.
pub fn lda_fit_with(
    documents: &[Vec<String>],
    config: &LdaConfig,
    mut after_sweep: impl FnMut(usize, &TopicModel),
) -> Result<TopicModel> {
    let k = config.k;
    if k < 2 {
        return Err(Error::OutOfRange {
            what: "topic count",
            value: k.to_string(),
            range: "2..".to_string(),
        });
    }
    if !(config.beta > 0.0) || !(config.alpha() > 0.0) {
        return Err(Error::invalid("Dirichlet priors must be positive"));
    }
    let mut index: BTreeMap<&str, usize> = BTreeMap::new();
    for tok in documents.iter().flatten() {
        index.entry(tok.as_str()).or_insert(0);
    }
    if index.is_empty() {
        return Err(Error::EmptyCorpus("topic model needs at least one token"));
    }
    if k > index.len() {
        return Err(Error::OutOfRange {
            what: "topic count",
            value: k.to_string(),
            range: format!("2..={}", index.len()),
        });
    }
    for (i, v) in index.values_mut().enumerate() {
        *v = i;
    }
    let vocabulary: Vec<String> = index.keys().map(|s| s.to_string()).collect();
    let words: Vec<Vec<usize>> = documents
        .iter()
        .map(|d| d.iter().map(|t| index[t.as_str()]).collect())
        .collect();
    let v = vocabulary.len();
    let alpha = config.alpha();
    let beta = config.beta;

    let mut r = rng(config.seed);
    let mut model = TopicModel {
        k,
        alpha,
        beta,
        seed: config.seed,
        iterations: config.iterations,
        vocabulary,
        topic_word: vec![vec![0; v]; k],
        doc_topic: vec![vec![0; k]; words.len()],
        topic_totals: vec![0; k],
        assignments: Vec::with_capacity(words.len()),
    };
    for (d, doc) in words.iter().enumerate() {
        let z: Vec<usize> = doc.iter().map(|_| r.random_range(0..k)).collect();
        for (&w, &t) in doc.iter().zip(&z) {
            model.topic_word[t][w] += 1;
            model.doc_topic[d][t] += 1;
            model.topic_totals[t] += 1;
        }
        model.assignments.push(z);
    }

    let v_beta = v as f64 * beta;
    let mut weights = vec![0.0; k];
    for sweep in 0..config.iterations {
        for (d, doc) in words.iter().enumerate() {
            for (i, &w) in doc.iter().enumerate() {
                let old = model.assignments[d][i];
                model.topic_word[old][w] -= 1;
                model.doc_topic[d][old] -= 1;
                model.topic_totals[old] -= 1;

                let mut total = 0.0;
                for (t, wt) in weights.iter_mut().enumerate() {
                    *wt = (model.doc_topic[d][t] as f64 + alpha) * (model.topic_word[t][w] as f64 + beta)
                        / (model.topic_totals[t] as f64 + v_beta);
                    total += *wt;
                }
                let mut u = r.random::<f64>() * total;
                let mut new = k - 1;
                for (t, &wt) in weights.iter().enumerate() {
                    if u < wt {
                        new = t;
                        break;
                    }
                    u -= wt;
                }

                model.assignments[d][i] = new;
                model.topic_word[new][w] += 1;
                model.doc_topic[d][new] += 1;
                model.topic_totals[new] += 1;
            }
        }
        after_sweep(sweep, &model);
    }
    Ok(model)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicAssociation {
    pub topic: usize,
    pub n_docs: usize,
    pub n_positive: usize,
    pub fraction: f64,
    pub top_words: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicRanking {
    /// Topics with at least one dominant document, by positive fraction
    /// descending, then document count descending.
    pub ranked: Vec<TopicAssociation>,
    /// Topics that are no document's dominant topic.
    pub excluded: Vec<usize>,
    /// Documents without tokens, which have no dominant topic.
    pub n_unassigned: usize,
}

pub fn topic_newsworthiness(model: &TopicModel, labels: &[bool], top_m: usize) -> Result<TopicRanking> {
    if labels.len() != model.doc_topic.len() {
        return Err(Error::invalid(format!(
            "{} labels for {} documents",
            labels.len(),
            model.doc_topic.len()
        )));
    }
    let mut docs = vec![0usize; model.k];
    let mut positives = vec![0usize; model.k];
    let mut n_unassigned = 0;
    for (d, &label) in labels.iter().enumerate() {
        match model.dominant_topic(d) {
            Some(t) => {
                docs[t] += 1;
                positives[t] += usize::from(label);
            }
            None => n_unassigned += 1,
        }
    }
    let (mut ranked, mut excluded) = (Vec::new(), Vec::new());
    for t in 0..model.k {
        if docs[t] == 0 {
            excluded.push(t);
            continue;
        }
        ranked.push(TopicAssociation {
            topic: t,
            n_docs: docs[t],
            n_positive: positives[t],
            fraction: positives[t] as f64 / docs[t] as f64,
            top_words: model.top_words(t, top_m).into_iter().map(|(w, _)| w).collect(),
        });
    }
    ranked.sort_by(|a, b| {
        b.fraction
            .total_cmp(&a.fraction)
            .then_with(|| b.n_docs.cmp(&a.n_docs))
            .then_with(|| a.topic.cmp(&b.topic))
    });
    Ok(TopicRanking {
        ranked,
        excluded,
        n_unassigned,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    const SET_A: &[&str] = &["housing", "rent", "tenant", "eviction", "landlord", "unit"];
    const SET_B: &[&str] = &["budget", "tax", "revenue", "fund", "audit", "bond"];

    fn two_set_corpus(seed: u64, n_docs: usize) -> (Vec<Vec<String>>, Vec<bool>) {
        let mut r = rng(seed);
        let mut docs = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n_docs {
            let set = if i % 2 == 0 { SET_A } else { SET_B };
            docs.push((0..30).map(|_| set[r.random_range(0..set.len())].to_string()).collect());
            labels.push(i % 2 == 0);
        }
        (docs, labels)
    }

    fn cfg(k: usize, seed: u64) -> LdaConfig {
        LdaConfig {
            k,
            iterations: 60,
            seed,
            alpha: Some(0.1),
            ..Default::default()
        }
    }

    #[test]
    fn recovers_disjoint_word_sets() {
        let (docs, _) = two_set_corpus(1, 60);
        let m = lda_fit(&docs, &cfg(2, 3)).unwrap();
        let a: HashSet<&str> = SET_A.iter().copied().collect();
        let b: HashSet<&str> = SET_B.iter().copied().collect();
        for t in 0..2 {
            let top: Vec<String> = m.top_words(t, 5).into_iter().map(|(w, _)| w).collect();
            let in_a = top.iter().all(|w| a.contains(w.as_str()));
            let in_b = top.iter().all(|w| b.contains(w.as_str()));
            assert!(in_a ^ in_b, "topic {t}: {top:?}");
        }
    }

    #[test]
    fn tokens_conserved_after_every_sweep() {
        let (docs, _) = two_set_corpus(2, 20);
        let n: usize = docs.iter().map(Vec::len).sum();
        let mut sweeps = 0;
        lda_fit_with(&docs, &cfg(3, 1), |_, m| {
            assert_eq!(m.conserved_tokens(), Some(n));
            sweeps += 1;
        })
        .unwrap();
        assert_eq!(sweeps, 60);
    }

    #[test]
    fn same_seed_same_assignments() {
        let (docs, _) = two_set_corpus(3, 10);
        let a = lda_fit(&docs, &cfg(2, 9)).unwrap();
        let b = lda_fit(&docs, &cfg(2, 9)).unwrap();
        assert_eq!(a.assignments, b.assignments);
    }

    #[test]
    fn k_equal_to_document_count() {
        let docs: Vec<Vec<String>> = ["a b c", "d e f", "g h i"]
            .iter()
            .map(|s| s.split(' ').map(String::from).collect())
            .collect();
        assert!(lda_fit(&docs, &cfg(3, 0)).is_ok());
        assert!(lda_fit(&docs, &cfg(10, 0)).is_err());
        assert!(lda_fit(&docs, &cfg(1, 0)).is_err());
        assert!(lda_fit(&[vec![]], &cfg(2, 0)).is_err());
    }

    #[test]
    fn default_alpha() {
        assert_eq!(LdaConfig::default().alpha(), 6.25);
    }

    #[test]
    fn newsworthy_topic_ranked_first() {
        let (docs, labels) = two_set_corpus(4, 60);
        let m = lda_fit(&docs, &cfg(2, 5)).unwrap();
        let ranking = topic_newsworthiness(&m, &labels, 5).unwrap();
        let first = &ranking.ranked[0];
        assert_eq!(first.fraction, 1.0);
        assert!(SET_A.contains(&first.top_words[0].as_str()));
    }

    #[test]
    fn uniform_labels_give_equal_fractions() {
        let (docs, _) = two_set_corpus(5, 30);
        let m = lda_fit(&docs, &cfg(3, 5)).unwrap();
        let ranking = topic_newsworthiness(&m, &vec![true; docs.len()], 3).unwrap();
        assert!(ranking.ranked.iter().all(|t| t.fraction == 1.0));
        assert_eq!(ranking.ranked.len() + ranking.excluded.len(), 3);
    }

    #[test]
    fn ranking_ignores_topic_ids() {
        let (docs, _) = two_set_corpus(6, 40);
        let mut m = lda_fit(&docs, &cfg(4, 2)).unwrap();
        let labels: Vec<bool> = (0..docs.len()).map(|i| i % 3 == 0).collect();
        let before = topic_newsworthiness(&m, &labels, 3).unwrap();
        m.topic_word.reverse();
        m.topic_totals.reverse();
        m.doc_topic.iter_mut().for_each(|row| row.reverse());
        let after = topic_newsworthiness(&m, &labels, 3).unwrap();
        let key = |r: &TopicRanking| -> Vec<(usize, usize, Vec<String>)> {
            let mut v: Vec<_> = r.ranked.iter().map(|t| (t.n_docs, t.n_positive, t.top_words.clone())).collect();
            v.sort();
            v
        };
        assert_eq!(key(&before), key(&after));
    }

    #[test]
    fn label_count_must_match() {
        let (docs, _) = two_set_corpus(7, 4);
        let m = lda_fit(&docs, &cfg(2, 0)).unwrap();
        assert!(topic_newsworthiness(&m, &[true], 3).is_err());
    }
}
