use std::collections::HashMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::chain::{ChainStep, FinalSimilarity, PrmChain, SimilarityTarget, StepScorer};
use super::external::ExternalYesNoClient;
use super::rules::RecentVoteRule;
use crate::corpus::{Annotation, Article, CorpusStore};
use crate::error::{Error, Result};
use crate::learn::{
    bootstrap_from_keyword, delete_keyword, train_logistic, BootstrapConfig, LabeledExample, LogisticModel,
    TrainConfig,
};
use crate::textvec::{tokenize_with, TfIdfModel, TokenizerConfig};
use crate::util::rng;

pub const BODY_STEP: &str = "h1_covers_body";
pub const VOTES_STEP: &str = "h2_votes_policy";
pub const RECENT_STEP: &str = "h3_recent_votes";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecentVoteScorer {
    #[default]
    Rule,
    External,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChainConfig {
    pub keyword: String,
    pub negative_ratio: f64,
    /// Annotated articles sampled to refine the body step.
    pub body_samples: usize,
    /// Annotated articles sampled, among body-step positives, for the votes step.
    pub votes_samples: usize,
    pub body_gate: Option<f64>,
    pub votes_gate: Option<f64>,
    pub recent_gate: Option<f64>,
    pub recent_scorer: RecentVoteScorer,
    pub rule: RecentVoteRule,
    pub target: SimilarityTarget,
    pub train: TrainConfig,
    pub seed: u64,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            keyword: "Board of Supervisors".to_string(),
            negative_ratio: 1.0,
            body_samples: 100,
            votes_samples: 100,
            body_gate: Some(0.5),
            votes_gate: Some(0.5),
            recent_gate: Some(0.5),
            recent_scorer: RecentVoteScorer::Rule,
            rule: RecentVoteRule::default(),
            target: SimilarityTarget::PolicyText,
            train: TrainConfig::default(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ChainTrainingReport {
    pub keyword_positives: usize,
    pub keyword_negatives: usize,
    pub keyword_expanded: usize,
    pub body_annotated: usize,
    pub votes_annotated: usize,
    pub votes_pool: usize,
}

#[derive(Debug, Clone)]
pub struct TrainedChain {
    pub chain: PrmChain,
    pub body_model: LogisticModel,
    pub votes_model: LogisticModel,
    pub report: ChainTrainingReport,
}

fn sample_ids(mut ids: Vec<&str>, n: usize, seed: u64) -> Vec<&str> {
    ids.sort_unstable();
    ids.shuffle(&mut rng(seed));
    ids.truncate(n);
    ids
}

/// Trains the three-step chain: body coverage bootstrapped from the
/// keyword and refined on a labelled sample, votes coverage on a labelled
/// sample of body positives, and the recent-vote scorer.
pub fn build_standard_chain(
    store: &CorpusStore,
    annotations: &[Annotation],
    config: &ChainConfig,
    external: Option<Arc<ExternalYesNoClient>>,
) -> Result<TrainedChain> {
    let articles = store.articles();
    let by_id: HashMap<&str, &Article> = articles.iter().map(|a| (a.id.as_str(), a)).collect();
    let mut report = ChainTrainingReport::default();
    let train = TrainConfig {
        seed: config.seed,
        ..config.train
    };

    // body step
    let boot_cfg = BootstrapConfig {
        train,
        ..BootstrapConfig::default()
    };
    let boot = bootstrap_from_keyword(articles, &config.keyword, config.negative_ratio, &boot_cfg)?;
    report.keyword_positives = boot.n_pos;
    report.keyword_negatives = boot.n_neg;
    report.keyword_expanded = boot.expanded.len();
    let space = Arc::new(boot.space.clone());
    let kw = tokenize_with(&config.keyword, boot_cfg.tokenizer);
    let stripped = |a: &Article| {
        let toks = tokenize_with(&a.text(), boot_cfg.tokenizer);
        space.transform_tokens(&delete_keyword(&toks, &kw).0)
    };
    let labelled: Vec<&str> = annotations
        .iter()
        .filter(|a| a.covers_body.is_some() && by_id.contains_key(a.article_id.as_str()))
        .map(|a| a.article_id.as_str())
        .collect();
    let body_labels: HashMap<&str, bool> = annotations
        .iter()
        .filter_map(|a| Some((a.article_id.as_str(), a.covers_body?)))
        .collect();
    let body_sample = sample_ids(labelled, config.body_samples, config.seed ^ 0x5eed_0001);
    report.body_annotated = body_sample.len();
    let mut examples: Vec<LabeledExample> = Vec::new();
    let overridden: std::collections::HashSet<&str> = body_sample.iter().copied().collect();
    for (ids, label) in [(&boot.positives, true), (&boot.negatives, false)] {
        for id in ids.iter().filter(|id| !overridden.contains(id.as_str())) {
            examples.push(LabeledExample::new(id.clone(), stripped(by_id[id.as_str()]), label));
        }
    }
    for id in &body_sample {
        examples.push(LabeledExample::new(*id, space.transform(&by_id[id].text()), body_labels[id]));
    }
    let body_model = train_logistic(&examples, Some(space.dim()), train)?;

    // votes step
    let full_space = Arc::new(TfIdfModel::fit(
        &articles.iter().map(Article::text).collect::<Vec<_>>(),
        TokenizerConfig::default(),
    )?);
    let votes_labels: HashMap<&str, bool> = annotations
        .iter()
        .filter_map(|a| Some((a.article_id.as_str(), a.covers_votes?)))
        .collect();
    let pool: Vec<&str> = articles
        .iter()
        .filter(|a| votes_labels.contains_key(a.id.as_str()))
        .filter(|a| body_model.predict_proba(&space.transform(&a.text())) >= 0.5)
        .map(|a| a.id.as_str())
        .collect();
    report.votes_pool = pool.len();
    let votes_sample = sample_ids(pool, config.votes_samples, config.seed ^ 0x5eed_0002);
    report.votes_annotated = votes_sample.len();
    let examples: Vec<LabeledExample> = votes_sample
        .iter()
        .map(|id| LabeledExample::new(*id, full_space.transform(&by_id[id].text()), votes_labels[id]))
        .collect();
    if examples.is_empty() {
        return Err(Error::EmptySplit("votes-step training sample"));
    }
    let votes_model = train_logistic(&examples, Some(full_space.dim()), train)?;

    // recent-vote step
    let recent = match (config.recent_scorer, external) {
        (RecentVoteScorer::Rule, _) => StepScorer::Rule(config.rule.clone()),
        (RecentVoteScorer::External, Some(client)) => StepScorer::External {
            client,
            fallback: config.rule.clone(),
        },
        (RecentVoteScorer::External, None) => {
            return Err(Error::Config("external recent-vote scorer selected without a client".into()))
        }
    };

    // final similarity over articles and policy targets
    let mut sim_docs: Vec<String> = articles.iter().map(Article::text).collect();
    sim_docs.extend(store.policies().iter().map(|p| p.text()));
    let sim_space = TfIdfModel::fit(&sim_docs, TokenizerConfig::default().with_stopwords_removed())?;

    let steps = vec![
        ChainStep::new(
            BODY_STEP,
            StepScorer::Logistic {
                model: body_model.clone(),
                space,
            },
            config.body_gate,
        )?,
        ChainStep::new(
            VOTES_STEP,
            StepScorer::Logistic {
                model: votes_model.clone(),
                space: full_space,
            },
            config.votes_gate,
        )?,
        ChainStep::new(RECENT_STEP, recent, config.recent_gate)?,
    ];
    let chain = PrmChain::new(steps, FinalSimilarity::new(Arc::new(sim_space), config.target))?;
    Ok(TrainedChain {
        chain,
        body_model,
        votes_model,
        report,
    })
}
