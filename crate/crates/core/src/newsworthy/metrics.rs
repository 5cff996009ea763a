use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::prompt::PromptRecord;
use super::ranker::PromptScorer;
use crate::error::{Error, Result};
use crate::learn::{evaluate_binary, roc_auc};

pub const DEFAULT_K: usize = 10;
pub const F1_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredPrompt {
    pub meeting_id: String,
    pub policy_id: String,
    pub score: f64,
    pub label: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub policy_id: String,
    pub score: f64,
    pub label: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedList {
    pub meeting_id: String,
    /// Descending by score, ties by ascending policy id.
    pub entries: Vec<RankedEntry>,
}

impl RankedList {
    pub fn new(meeting_id: impl Into<String>, mut entries: Vec<RankedEntry>) -> Self {
        entries.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.policy_id.cmp(&b.policy_id)));
        Self {
            meeting_id: meeting_id.into(),
            entries,
        }
    }

    pub fn n_positive(&self) -> usize {
        self.entries.iter().filter(|e| e.label).count()
    }

    /// Fraction of this meeting's positives in the top `k`; `None` without positives.
    pub fn recall_at(&self, k: usize) -> Option<f64> {
        let pos = self.n_positive();
        (pos > 0).then(|| self.entries.iter().take(k).filter(|e| e.label).count() as f64 / pos as f64)
    }

    /// 1-based ranks of the positives.
    pub fn positive_ranks(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().enumerate().filter(|(_, e)| e.label).map(|(i, _)| i + 1)
    }
}

/// Ranks one meeting's prompts with `scorer`.
pub fn rank_meeting(scorer: &dyn PromptScorer, records: &[PromptRecord]) -> Result<RankedList> {
    let first = records.first().ok_or(Error::EmptySplit("meeting prompts"))?;
    if let Some(other) = records.iter().find(|r| r.meeting_id != first.meeting_id) {
        return Err(Error::invalid(format!(
            "rank_meeting got prompts from {} and {}",
            first.meeting_id, other.meeting_id
        )));
    }
    let entries = records
        .iter()
        .map(|r| {
            Ok(RankedEntry {
                policy_id: r.policy_id.clone(),
                score: scorer.score(&r.text)?,
                label: r.label,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RankedList::new(first.meeting_id.clone(), entries))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MrrMode {
    /// Mean of 1/rank over every positive policy.
    #[default]
    PerPositive,
    /// Mean over meetings of 1/rank of the first positive.
    FirstHit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankMetrics {
    pub f1: f64,
    pub roc_auc: f64,
    pub recall_at_10: f64,
    pub mrr: f64,
    pub n_test: usize,
    pub n_positive: usize,
}

pub fn group_by_meeting(scored: &[ScoredPrompt]) -> Vec<RankedList> {
    let mut groups: BTreeMap<&str, Vec<RankedEntry>> = BTreeMap::new();
    for s in scored {
        groups.entry(&s.meeting_id).or_default().push(RankedEntry {
            policy_id: s.policy_id.clone(),
            score: s.score,
            label: s.label,
        });
    }
    groups.into_iter().map(|(m, e)| RankedList::new(m, e)).collect()
}

pub fn rank_metrics(scored: &[ScoredPrompt], k: usize, mode: MrrMode) -> Result<RankMetrics> {
    let pairs: Vec<(f64, bool)> = scored.iter().map(|s| (s.score, s.label)).collect();
    let n_positive = pairs.iter().filter(|p| p.1).count();
    if n_positive == 0 {
        return Err(Error::NoPositives);
    }
    let lists = group_by_meeting(scored);
    let recalls: Vec<f64> = lists.iter().filter_map(|l| l.recall_at(k)).collect();
    let rr: Vec<f64> = match mode {
        MrrMode::PerPositive => lists
            .iter()
            .flat_map(|l| l.positive_ranks().map(|r| 1.0 / r as f64))
            .collect(),
        MrrMode::FirstHit => lists
            .iter()
            .filter_map(|l| l.positive_ranks().next().map(|r| 1.0 / r as f64))
            .collect(),
    };
    Ok(RankMetrics {
        f1: evaluate_binary(&pairs, F1_THRESHOLD).f1,
        roc_auc: roc_auc(&pairs),
        recall_at_10: recalls.iter().sum::<f64>() / recalls.len() as f64,
        mrr: rr.iter().sum::<f64>() / rr.len() as f64,
        n_test: pairs.len(),
        n_positive,
    })
}

pub fn score_prompts(scorer: &dyn PromptScorer, records: &[PromptRecord]) -> Result<Vec<ScoredPrompt>> {
    records
        .par_iter()
        .map(|r| {
            Ok(ScoredPrompt {
                meeting_id: r.meeting_id.clone(),
                policy_id: r.policy_id.clone(),
                score: scorer.score(&r.text)?,
                label: r.label,
            })
        })
        .collect()
}

pub fn eval_ranker(scorer: &dyn PromptScorer, test: &[PromptRecord]) -> Result<RankMetrics> {
    rank_metrics(&score_prompts(scorer, test)?, DEFAULT_K, MrrMode::default())
}
