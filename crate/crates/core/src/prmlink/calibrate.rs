use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::chain::LinkScore;
use crate::corpus::{GoldPair, Split};
use crate::error::{Error, Result};
use crate::learn::{roc_auc, Counts, EvalReport};

pub type PairSet = HashSet<(String, String)>;

pub fn gold_pairs(gold: &[GoldPair], split: Split) -> PairSet {
    gold.iter()
        .filter(|g| g.split == split)
        .map(|g| (g.article_id.clone(), g.policy_id.clone()))
        .collect()
}

/// Scores usable for one split: every pair except those whose article is a
/// gold article of the other split.
pub fn evaluation_universe(scores: &[LinkScore], gold: &[GoldPair], split: Split) -> Vec<LinkScore> {
    let held_out: HashSet<&str> = gold
        .iter()
        .filter(|g| g.split != split)
        .map(|g| g.article_id.as_str())
        .collect();
    scores
        .iter()
        .filter(|s| !held_out.contains(s.article_id.as_str()))
        .cloned()
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaCalibration {
    pub lambda: f64,
    pub train_f1: f64,
    /// `(threshold, F1)` for every distinct unpruned score, descending.
    pub sweep: Vec<(f64, f64)>,
    /// All unpruned scores were equal (or there were none).
    pub degenerate: bool,
}

fn is_gold(s: &LinkScore, gold: &PairSet) -> bool {
    gold.contains(&(s.article_id.clone(), s.policy_id.clone()))
}

/// Picks the threshold with the best F1 against `gold_train`; ties go to
/// the larger threshold.
pub fn calibrate_lambda(scores: &[LinkScore], gold_train: &PairSet) -> Result<LambdaCalibration> {
    if gold_train.is_empty() {
        return Err(Error::EmptySplit("gold train"));
    }
    let mut live: Vec<(f64, bool)> = scores
        .iter()
        .filter(|s| !s.is_pruned())
        .map(|s| (s.score, is_gold(s, gold_train)))
        .collect();
    live.sort_by(|a, b| b.0.total_cmp(&a.0));

    let n_gold = gold_train.len();
    let mut sweep = Vec::new();
    let (mut tp, mut predicted) = (0usize, 0usize);
    let mut i = 0;
    while i < live.len() {
        let t = live[i].0;
        while i < live.len() && live[i].0 == t {
            tp += live[i].1 as usize;
            predicted += 1;
            i += 1;
        }
        let counts = Counts {
            tp,
            fp: predicted - tp,
            fn_: n_gold.saturating_sub(tp),
            tn: 0,
        };
        sweep.push((t, counts.f1()));
    }

    let degenerate = sweep.len() <= 1;
    let Some(&(mut lambda, mut best)) = sweep.first() else {
        return Ok(LambdaCalibration {
            lambda: 1.0,
            train_f1: 0.0,
            sweep,
            degenerate,
        });
    };
    for &(t, f1) in &sweep[1..] {
        if f1 > best {
            best = f1;
            lambda = t;
        }
    }
    Ok(LambdaCalibration {
        lambda,
        train_f1: best,
        sweep,
        degenerate,
    })
}

/// F1 of `predicted_at(λ)` against `gold`; gold pairs missing from `scores`
/// count as misses. ROC-AUC ranks every score in the universe.
pub fn evaluate_links(scores: &[LinkScore], gold: &PairSet, lambda: f64) -> Result<EvalReport> {
    if gold.is_empty() {
        return Err(Error::EmptySplit("gold test"));
    }
    let mut counts = Counts::default();
    let mut seen: HashMap<(&str, &str), ()> = HashMap::new();
    let mut ranked = Vec::with_capacity(scores.len());
    for s in scores {
        let label = is_gold(s, gold);
        if label {
            seen.insert(s.key(), ());
        }
        ranked.push((s.score, label));
        match (s.predicted_at(lambda), label) {
            (true, true) => counts.tp += 1,
            (true, false) => counts.fp += 1,
            (false, true) => counts.fn_ += 1,
            (false, false) => counts.tn += 1,
        }
    }
    counts.fn_ += gold.len() - seen.len();
    Ok(EvalReport::from_counts(counts, roc_auc(&ranked), lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ls(a: &str, p: &str, score: f64) -> LinkScore {
        LinkScore {
            article_id: a.into(),
            policy_id: p.into(),
            step_probs: vec![],
            similarity: Some(score),
            score,
            pruned_at: None,
            degraded: false,
        }
    }

    fn set(pairs: &[(&str, &str)]) -> PairSet {
        pairs.iter().map(|(a, p)| (a.to_string(), p.to_string())).collect()
    }

    #[test]
    fn separable_scores() {
        let scores = vec![ls("a", "p", 0.9), ls("b", "p", 0.8), ls("c", "p", 0.1)];
        let cal = calibrate_lambda(&scores, &set(&[("a", "p"), ("b", "p")])).unwrap();
        assert!(cal.lambda > 0.1 && cal.lambda <= 0.8);
        assert_eq!(cal.train_f1, 1.0);
        assert!(!cal.degenerate);
    }

    #[test]
    fn single_gold_candidate() {
        let cal = calibrate_lambda(&[ls("a", "p", 0.5)], &set(&[("a", "p")])).unwrap();
        assert_eq!(cal.lambda, 0.5);
        assert_eq!(cal.train_f1, 1.0);
        assert!(cal.degenerate);
    }

    #[test]
    fn zero_scored_gold_is_a_miss() {
        let scores = vec![ls("a", "p", 0.0), ls("b", "p", 0.7)];
        let gold = set(&[("a", "p"), ("b", "p")]);
        let r = evaluate_links(&scores, &gold, 0.5).unwrap();
        assert_eq!(r.recall, 0.5);
    }

    #[test]
    fn lambda_above_max_gives_zero() {
        let scores = vec![ls("a", "p", 0.4)];
        let r = evaluate_links(&scores, &set(&[("a", "p")]), 0.9).unwrap();
        assert_eq!((r.recall, r.f1), (0.0, 0.0));
    }

    #[test]
    fn gold_outside_scores_counts_as_miss() {
        let r = evaluate_links(&[ls("a", "p", 0.9)], &set(&[("a", "p"), ("z", "q")]), 0.5).unwrap();
        assert_eq!(r.counts.fn_, 1);
        assert_eq!(r.counts.tp, 1);
    }

    #[test]
    fn empty_gold_errors() {
        assert!(calibrate_lambda(&[ls("a", "p", 0.5)], &PairSet::new()).is_err());
        assert!(evaluate_links(&[ls("a", "p", 0.5)], &PairSet::new(), 0.5).is_err());
    }

    #[test]
    fn universe_drops_other_split_articles() {
        let gold = vec![
            GoldPair { article_id: "a".into(), policy_id: "p".into(), split: Split::Train },
            GoldPair { article_id: "b".into(), policy_id: "p".into(), split: Split::Test },
        ];
        let scores = vec![ls("a", "p", 0.9), ls("a", "q", 0.2), ls("b", "p", 0.9), ls("c", "p", 0.3)];
        let train: Vec<_> = evaluation_universe(&scores, &gold, Split::Train).iter().map(|s| s.article_id.clone()).collect();
        assert_eq!(train, vec!["a", "a", "c"]);
    }

    fn brute_force(scores: &[LinkScore], gold: &PairSet) -> (f64, f64) {
        let mut best = (f64::NAN, -1.0);
        for s in scores.iter().filter(|s| !s.is_pruned()) {
            let f1 = evaluate_links(scores, gold, s.score).unwrap().f1;
            if f1 > best.1 || (f1 == best.1 && s.score > best.0) {
                best = (s.score, f1);
            }
        }
        best
    }

    proptest! {
        #[test]
        fn sweep_matches_exhaustive_oracle(
            raw in prop::collection::vec((0u8..8, 0u8..4, 0u8..6, any::<bool>()), 1..40),
        ) {
            let mut scores = Vec::new();
            let mut seen = HashSet::new();
            let mut gold = PairSet::new();
            for (a, p, s, g) in raw {
                if !seen.insert((a, p)) { continue; }
                let (a, p) = (format!("a{a}"), format!("p{p}"));
                if g { gold.insert((a.clone(), p.clone())); }
                scores.push(ls(&a, &p, s as f64 / 5.0));
            }
            prop_assume!(!gold.is_empty());
            let cal = calibrate_lambda(&scores, &gold).unwrap();
            let (lambda, f1) = brute_force(&scores, &gold);
            prop_assert_eq!(cal.lambda, lambda);
            prop_assert!((cal.train_f1 - f1).abs() < 1e-12);
            // calibrated F1 is reproducible through evaluation
            let re = evaluate_links(&scores, &gold, cal.lambda).unwrap();
            prop_assert!((re.f1 - cal.train_f1).abs() < 1e-12);
        }
    }
}
