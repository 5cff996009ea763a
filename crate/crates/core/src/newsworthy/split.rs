use chrono::NaiveDate;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::features::NewsworthyExample;
use crate::error::{Error, Result};
use crate::util::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitConfig {
    pub cutoff: NaiveDate,
    pub balance_train: bool,
    pub seed: u64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            cutoff: NaiveDate::from_ymd_opt(2021, 1, 1).unwrap(),
            balance_train: true,
            seed: 0,
        }
    }
}

/// Downsamples the majority class to the minority count, keeping input
/// order. A single-class set is returned unchanged.
pub fn balance(examples: Vec<NewsworthyExample>, seed: u64) -> Vec<NewsworthyExample> {
    let n_pos = examples.iter().filter(|e| e.label).count();
    let n_neg = examples.len() - n_pos;
    if n_pos == 0 || n_neg == 0 || n_pos == n_neg {
        return examples;
    }
    let majority = n_pos > n_neg;
    let mut idx: Vec<usize> = (0..examples.len()).filter(|&i| examples[i].label == majority).collect();
    idx.shuffle(&mut rng(seed));
    let mut keep = vec![true; examples.len()];
    for &i in &idx[n_pos.min(n_neg)..] {
        keep[i] = false;
    }
    examples
        .into_iter()
        .zip(keep)
        .filter_map(|(e, k)| k.then_some(e))
        .collect()
}

/// Train is strictly before the cutoff, test on or after it. Only the train
/// side is balanced.
pub fn temporal_split(
    examples: &[NewsworthyExample],
    config: &SplitConfig,
) -> Result<(Vec<NewsworthyExample>, Vec<NewsworthyExample>)> {
    let (train, test): (Vec<_>, Vec<_>) = examples.iter().cloned().partition(|e| e.meeting_date < config.cutoff);
    if train.is_empty() {
        return Err(Error::EmptySplit("train"));
    }
    if test.is_empty() {
        return Err(Error::EmptySplit("test"));
    }
    let train = if config.balance_train {
        balance(train, config.seed)
    } else {
        train
    };
    Ok((train, test))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn ex(i: usize, day: NaiveDate, label: bool) -> NewsworthyExample {
        NewsworthyExample {
            policy_id: format!("p{i}"),
            meeting_id: "m".into(),
            meeting_date: day,
            label,
            policy_text: String::new(),
            n_prior_meetings: 0,
            n_prior_articles: 0,
            discussion_minutes: 0.0,
            n_words: 0,
            discussion_text: String::new(),
            n_speakers: 0,
            n_public_commenters: 0,
            public_comment_minutes: 0.0,
            public_comment_text: String::new(),
        }
    }

    fn d(y: i32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, 6, 1).unwrap()
    }

    #[test]
    fn all_before_cutoff_errors() {
        let xs = vec![ex(0, d(2019), true), ex(1, d(2020), false)];
        assert!(matches!(temporal_split(&xs, &SplitConfig::default()), Err(Error::EmptySplit("test"))));
    }

    #[test]
    fn balancing_matches_minority() {
        let mut xs: Vec<_> = (0..1000).map(|i| ex(i, d(2019), false)).collect();
        xs.extend((1000..1100).map(|i| ex(i, d(2019), true)));
        xs.push(ex(2000, d(2022), true));
        let cfg = SplitConfig { seed: 3, ..SplitConfig::default() };
        let (train, test) = temporal_split(&xs, &cfg).unwrap();
        let pos = train.iter().filter(|e| e.label).count();
        assert_eq!((pos, train.len() - pos), (100, 100));
        assert_eq!(test.len(), 1);
        assert_eq!(temporal_split(&xs, &cfg).unwrap().0, train);
    }

    #[test]
    fn unbalanced_split_partitions_input() {
        let xs: Vec<_> = (0..20).map(|i| ex(i, d(2015 + (i % 8) as i32), i % 3 == 0)).collect();
        let cfg = SplitConfig { balance_train: false, ..SplitConfig::default() };
        let (train, test) = temporal_split(&xs, &cfg).unwrap();
        assert_eq!(train.len() + test.len(), xs.len());
        assert!(train.iter().all(|e| e.meeting_date < cfg.cutoff));
        assert!(test.iter().all(|e| e.meeting_date >= cfg.cutoff));
    }
}
