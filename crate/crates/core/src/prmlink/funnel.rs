use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use super::chain::{LinkScore, PrmChain};
use crate::corpus::{Article, CandidatePair, CorpusStore, PolicyItem};
use crate::error::{Error, Result};
use crate::textvec::cosine;

fn lookup_article<'a>(store: &'a CorpusStore, id: &str) -> Result<&'a Article> {
    store.article(id).ok_or_else(|| Error::UnknownId {
        kind: "article",
        id: id.to_string(),
    })
}

fn lookup_policy<'a>(store: &'a CorpusStore, id: &str) -> Result<&'a PolicyItem> {
    store.policy(id).ok_or_else(|| Error::UnknownId {
        kind: "policy",
        id: id.to_string(),
    })
}

/// Scores every candidate pair. Steps run once per article and target
/// vectors once per policy; output follows the input pair order.
pub fn run_funnel(chain: &PrmChain, store: &CorpusStore, pairs: &[CandidatePair]) -> Result<Vec<LinkScore>> {
    let article_ids: BTreeSet<&str> = pairs.iter().map(|p| p.article_id.as_str()).collect();
    let policy_ids: BTreeSet<&str> = pairs.iter().map(|p| p.policy_id.as_str()).collect();
    let articles: Vec<&Article> = article_ids
        .iter()
        .map(|id| lookup_article(store, id))
        .collect::<Result<_>>()?;
    let policies: Vec<&PolicyItem> = policy_ids
        .iter()
        .map(|id| lookup_policy(store, id))
        .collect::<Result<_>>()?;

    let sim = chain.similarity();
    let passes: BTreeMap<&str, _> = articles
        .par_iter()
        .map(|a| {
            let pass = chain.run_steps(a);
            let vec = pass.pruned_at.is_none().then(|| sim.embed(&a.text()));
            (a.id.as_str(), (*a, pass, vec))
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect();
    let targets: BTreeMap<&str, _> = policies
        .par_iter()
        .map(|p| (p.id.as_str(), sim.embed(&sim.target_text(p, Some(store)))))
        .collect::<Vec<_>>()
        .into_iter()
        .collect();

    Ok(pairs
        .par_iter()
        .map(|pair| {
            let (article, pass, vec) = &passes[pair.article_id.as_str()];
            let target = &targets[pair.policy_id.as_str()];
            chain.finish(pass, article, &pair.policy_id, || {
                cosine(vec.as_ref().expect("unpruned articles are embedded"), target)
            })
        })
        .collect())
}
