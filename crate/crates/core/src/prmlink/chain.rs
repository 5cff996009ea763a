use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::external::ExternalYesNoClient;
use super::rules::RecentVoteRule;
use crate::corpus::{Article, CorpusStore, PolicyItem};
use crate::error::{Error, Result};
use crate::learn::LogisticModel;
use crate::textvec::{cosine, SparseVector, TfIdfModel, VectorSpace};

/// How a step turns an article into a probability.
#[derive(Clone)]
pub enum StepScorer {
    Logistic { model: LogisticModel, space: Arc<TfIdfModel> },
    External { client: Arc<ExternalYesNoClient>, fallback: RecentVoteRule },
    Rule(RecentVoteRule),
    /// Fixed probability; mostly useful in tests.
    Constant(f64),
}

impl std::fmt::Debug for StepScorer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StepScorer::Logistic { model, .. } => write!(f, "Logistic(dim={})", model.weights.len()),
            StepScorer::External { .. } => f.write_str("External"),
            StepScorer::Rule(r) => write!(f, "Rule({:?})", r.body_name),
            StepScorer::Constant(p) => write!(f, "Constant({p})"),
        }
    }
}

/// Probability from one step, flagged when the external client failed and
/// the rule fallback answered instead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutput {
    pub prob: f64,
    pub degraded: bool,
}

impl StepScorer {
    pub fn kind(&self) -> &'static str {
        match self {
            StepScorer::Logistic { .. } => "logistic",
            StepScorer::External { .. } => "external",
            StepScorer::Rule(_) => "rule",
            StepScorer::Constant(_) => "constant",
        }
    }

    pub fn score(&self, article: &Article) -> StepOutput {
        match self {
            StepScorer::Logistic { model, space } => StepOutput {
                prob: model.predict_proba(&space.transform(&article.text())),
                degraded: false,
            },
            StepScorer::External { client, fallback } => match client.probability(article) {
                Ok(prob) => StepOutput { prob, degraded: false },
                Err(e) => {
                    log::warn!("external scorer failed for {}: {e}; using rule fallback", article.id);
                    StepOutput {
                        prob: fallback.probability(article),
                        degraded: true,
                    }
                }
            },
            StepScorer::Rule(rule) => StepOutput {
                prob: rule.probability(article),
                degraded: false,
            },
            StepScorer::Constant(p) => StepOutput {
                prob: *p,
                degraded: false,
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct ChainStep {
    name: String,
    scorer: StepScorer,
    gate: Option<f64>,
}

impl ChainStep {
    pub fn new(name: impl Into<String>, scorer: StepScorer, gate: Option<f64>) -> Result<Self> {
        if let Some(g) = gate {
            if !(g > 0.0 && g < 1.0) {
                return Err(Error::OutOfRange {
                    what: "gate",
                    value: g.to_string(),
                    range: "(0, 1)".to_string(),
                });
            }
        }
        Ok(Self {
            name: name.into(),
            scorer,
            gate,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn gate(&self) -> Option<f64> {
        self.gate
    }

    pub fn scorer(&self) -> &StepScorer {
        &self.scorer
    }

    pub fn passes(&self, prob: f64) -> bool {
        self.gate.is_none_or(|g| prob >= g)
    }
}

/// Text each policy is compared against in the final similarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimilarityTarget {
    /// Title and description.
    #[default]
    PolicyText,
    /// Minutes of every meeting that discussed the policy; falls back to
    /// the policy text when no minutes are available.
    Minutes,
}

#[derive(Clone)]
pub struct FinalSimilarity {
    space: Arc<dyn VectorSpace>,
    target: SimilarityTarget,
}

impl FinalSimilarity {
    pub fn new(space: Arc<dyn VectorSpace>, target: SimilarityTarget) -> Self {
        Self { space, target }
    }

    pub fn target(&self) -> SimilarityTarget {
        self.target
    }

    pub fn embed(&self, text: &str) -> SparseVector {
        self.space.embed(text)
    }

    pub fn target_text(&self, policy: &PolicyItem, store: Option<&CorpusStore>) -> String {
        match (self.target, store) {
            (SimilarityTarget::Minutes, Some(store)) => {
                let minutes: Vec<&str> = policy
                    .meeting_ids
                    .iter()
                    .filter_map(|m| store.meeting(m))
                    .filter_map(|m| m.minutes_text.as_deref())
                    .collect();
                if minutes.is_empty() {
                    policy.text()
                } else {
                    minutes.join("\n")
                }
            }
            _ => policy.text(),
        }
    }
}

impl std::fmt::Debug for FinalSimilarity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FinalSimilarity").field("target", &self.target).finish_non_exhaustive()
    }
}

/// Ordered attribute steps followed by a final similarity.
#[derive(Debug, Clone)]
pub struct PrmChain {
    steps: Vec<ChainStep>,
    similarity: FinalSimilarity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkScore {
    pub article_id: String,
    pub policy_id: String,
    /// Probabilities of the steps that ran, in chain order.
    pub step_probs: Vec<(String, f64)>,
    /// `None` when the pair was pruned before the similarity ran.
    pub similarity: Option<f64>,
    pub score: f64,
    pub pruned_at: Option<String>,
    pub degraded: bool,
}

impl LinkScore {
    pub fn key(&self) -> (&str, &str) {
        (&self.article_id, &self.policy_id)
    }

    pub fn is_pruned(&self) -> bool {
        self.pruned_at.is_some()
    }

    /// The one predicate both calibration and evaluation use.
    pub fn predicted_at(&self, lambda: f64) -> bool {
        !self.is_pruned() && self.score >= lambda
    }
}

/// Article-level outcome of the steps, shared by all of its pairs.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ArticlePass {
    pub step_probs: Vec<(String, f64)>,
    pub product: f64,
    pub pruned_at: Option<String>,
    pub degraded: bool,
}

impl PrmChain {
    pub fn new(steps: Vec<ChainStep>, similarity: FinalSimilarity) -> Result<Self> {
        let mut seen = HashMap::new();
        for s in &steps {
            if seen.insert(s.name.clone(), ()).is_some() {
                return Err(Error::invalid(format!("duplicate chain step name {:?}", s.name)));
            }
        }
        Ok(Self { steps, similarity })
    }

    pub fn steps(&self) -> &[ChainStep] {
        &self.steps
    }

    pub fn step_names(&self) -> Vec<String> {
        self.steps.iter().map(|s| s.name.clone()).collect()
    }

    pub fn similarity(&self) -> &FinalSimilarity {
        &self.similarity
    }

    pub(crate) fn run_steps(&self, article: &Article) -> ArticlePass {
        let mut pass = ArticlePass {
            step_probs: Vec::with_capacity(self.steps.len()),
            product: 1.0,
            pruned_at: None,
            degraded: false,
        };
        for step in &self.steps {
            let out = step.scorer.score(article);
            let prob = out.prob.clamp(0.0, 1.0);
            pass.degraded |= out.degraded;
            pass.step_probs.push((step.name.clone(), prob));
            if !step.passes(prob) {
                pass.pruned_at = Some(step.name.clone());
                pass.product = 0.0;
                break;
            }
            pass.product *= prob;
        }
        pass
    }

    pub(crate) fn finish(&self, pass: &ArticlePass, article: &Article, policy_id: &str, sim: impl FnOnce() -> f64) -> LinkScore {
        let (similarity, score) = if pass.pruned_at.is_some() {
            (None, 0.0)
        } else {
            let s = sim().clamp(0.0, 1.0);
            (Some(s), pass.product * s)
        };
        LinkScore {
            article_id: article.id.clone(),
            policy_id: policy_id.to_string(),
            step_probs: pass.step_probs.clone(),
            similarity,
            score,
            pruned_at: pass.pruned_at.clone(),
            degraded: pass.degraded,
        }
    }

    /// Scores one pair from scratch; [`run_funnel`](super::run_funnel)
    /// produces identical values with article-level memoization.
    pub fn score_pair(&self, article: &Article, policy: &PolicyItem) -> LinkScore {
        self.score_pair_in(article, policy, None)
    }

    pub fn score_pair_in(&self, article: &Article, policy: &PolicyItem, store: Option<&CorpusStore>) -> LinkScore {
        let pass = self.run_steps(article);
        self.finish(&pass, article, &policy.id, || {
            cosine(
                &self.similarity.embed(&article.text()),
                &self.similarity.embed(&self.similarity.target_text(policy, store)),
            )
        })
    }
}

/// Keeps the first `k` steps and the same final similarity.
pub fn ablate_chain(chain: &PrmChain, k: usize) -> Result<PrmChain> {
    if k > chain.steps.len() {
        return Err(Error::OutOfRange {
            what: "chain length",
            value: k.to_string(),
            range: format!("0..={}", chain.steps.len()),
        });
    }
    Ok(PrmChain {
        steps: chain.steps[..k].to_vec(),
        similarity: chain.similarity.clone(),
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use chrono::NaiveDate;

    /// Similarity space whose cosine is fixed by the text length parity;
    /// enough to pin combined-score arithmetic.
    pub(crate) struct FixedSpace;

    impl VectorSpace for FixedSpace {
        fn embed(&self, text: &str) -> SparseVector {
            if text.starts_with("policy") {
                SparseVector::from_pairs(vec![(0, 1.0)])
            } else {
                SparseVector::from_pairs(vec![(0, 1.0), (1, 3f64.sqrt())]).normalized()
            }
        }
    }

    pub(crate) fn article(id: &str) -> Article {
        Article::new(id, format!("u/{id}"), NaiveDate::from_ymd_opt(2020, 1, 1).unwrap(), "", "body")
    }

    pub(crate) fn policy(id: &str) -> PolicyItem {
        PolicyItem {
            id: id.to_string(),
            title: "policy".to_string(),
            description: "text".to_string(),
            introduced_date: NaiveDate::from_ymd_opt(2020, 1, 1).unwrap(),
            meeting_ids: vec![],
        }
    }

    fn chain(probs: &[(f64, Option<f64>)]) -> PrmChain {
        let steps = probs
            .iter()
            .enumerate()
            .map(|(i, &(p, g))| ChainStep::new(format!("h{}", i + 1), StepScorer::Constant(p), g).unwrap())
            .collect();
        PrmChain::new(steps, FinalSimilarity::new(Arc::new(FixedSpace), SimilarityTarget::PolicyText)).unwrap()
    }

    #[test]
    fn product_of_steps_and_similarity() {
        // FixedSpace cosine is 1/2
        let s = chain(&[(0.9, None), (0.8, None)]).score_pair(&article("a"), &policy("p"));
        assert!((s.similarity.unwrap() - 0.5).abs() < 1e-12);
        assert!((s.score - 0.36).abs() < 1e-12);
        assert!(s.pruned_at.is_none());
    }

    #[test]
    fn gate_prunes_and_skips_rest() {
        let s = chain(&[(0.2, Some(0.5)), (0.8, None)]).score_pair(&article("a"), &policy("p"));
        assert_eq!(s.pruned_at.as_deref(), Some("h1"));
        assert_eq!(s.score, 0.0);
        assert_eq!(s.step_probs.len(), 1);
        assert!(s.similarity.is_none());
    }

    #[test]
    fn empty_chain_is_similarity_alone() {
        let s = chain(&[]).score_pair(&article("a"), &policy("p"));
        assert!((s.score - 0.5).abs() < 1e-12);
    }

    #[test]
    fn gates_outside_unit_interval_rejected() {
        assert!(ChainStep::new("h", StepScorer::Constant(0.5), Some(0.0)).is_err());
        assert!(ChainStep::new("h", StepScorer::Constant(0.5), Some(1.0)).is_err());
    }

    #[test]
    fn duplicate_names_rejected() {
        let steps = vec![
            ChainStep::new("h", StepScorer::Constant(0.5), None).unwrap(),
            ChainStep::new("h", StepScorer::Constant(0.5), None).unwrap(),
        ];
        assert!(PrmChain::new(steps, FinalSimilarity::new(Arc::new(FixedSpace), SimilarityTarget::PolicyText)).is_err());
    }

    #[test]
    fn ablation_truncates() {
        let c = chain(&[(0.9, None), (0.8, None), (0.7, None)]);
        assert_eq!(ablate_chain(&c, 0).unwrap().steps().len(), 0);
        assert_eq!(ablate_chain(&c, 3).unwrap().step_names(), c.step_names());
        assert!(ablate_chain(&c, 4).is_err());
    }

    #[test]
    fn combined_never_exceeds_a_factor() {
        let c = chain(&[(0.9, None), (0.3, None), (0.7, None)]);
        let s = c.score_pair(&article("a"), &policy("p"));
        assert!(s.step_probs.iter().all(|(_, p)| s.score <= *p));
        assert!(s.score <= s.similarity.unwrap());
    }
}
