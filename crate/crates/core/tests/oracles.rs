use std::collections::BTreeMap;

use civiclink::learn::{evaluate_binary, gradient_check, roc_auc, LabeledExample, TrainConfig};
use civiclink::newsworthy::{rank_metrics, MrrMode, ScoredPrompt, F1_THRESHOLD};
use civiclink::textvec::SparseVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fixture(seed: u64) -> Vec<ScoredPrompt> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let levels: Vec<f64> = (0..r.random_range(1..=12)).map(|i| i as f64 / 11.0).collect();
    let n_meetings = r.random_range(1..=5);
    let mut out = Vec::new();
    for m in 0..n_meetings {
        for p in 0..r.random_range(1..=20) {
            out.push(ScoredPrompt {
                meeting_id: format!("M{m}"),
                policy_id: format!("P{m}{p:02}"),
                score: levels[r.random_range(0..levels.len())],
                label: r.random_bool(0.25),
            });
        }
    }
    if !out.iter().any(|s| s.label) {
        out[0].label = true;
    }
    out
}

fn f1_oracle(s: &[ScoredPrompt]) -> f64 {
    let tp = s.iter().filter(|x| x.label && x.score >= F1_THRESHOLD).count() as f64;
    let pred = s.iter().filter(|x| x.score >= F1_THRESHOLD).count() as f64;
    let gold = s.iter().filter(|x| x.label).count() as f64;
    if tp == 0.0 {
        return 0.0;
    }
    let (p, r) = (tp / pred, tp / gold);
    2.0 * p * r / (p + r)
}

fn auc_oracle(s: &[ScoredPrompt]) -> f64 {
    let (mut wins, mut pairs) = (0.0, 0.0);
    for a in s.iter().filter(|x| x.label) {
        for b in s.iter().filter(|x| !x.label) {
            pairs += 1.0;
            if a.score > b.score {
                wins += 1.0;
            } else if a.score == b.score {
                wins += 0.5;
            }
        }
    }
    if pairs == 0.0 {
        0.5
    } else {
        wins / pairs
    }
}

/// Rank of `x` among its meeting: one plus everything ordered strictly ahead.
fn rank_of(x: &ScoredPrompt, meeting: &[&ScoredPrompt]) -> usize {
    1 + meeting
        .iter()
        .filter(|y| y.score > x.score || (y.score == x.score && y.policy_id < x.policy_id))
        .count()
}

fn ranking_oracles(s: &[ScoredPrompt], k: usize) -> (f64, f64, f64) {
    let mut meetings: BTreeMap<&str, Vec<&ScoredPrompt>> = BTreeMap::new();
    for x in s {
        meetings.entry(&x.meeting_id).or_default().push(x);
    }
    let (mut recalls, mut per_positive, mut first_hit) = (Vec::new(), Vec::new(), Vec::new());
    for group in meetings.values() {
        let mut ranks: Vec<usize> = group.iter().filter(|x| x.label).map(|x| rank_of(x, group)).collect();
        if ranks.is_empty() {
            continue;
        }
        ranks.sort_unstable();
        recalls.push(ranks.iter().filter(|&&r| r <= k).count() as f64 / ranks.len() as f64);
        per_positive.extend(ranks.iter().map(|&r| 1.0 / r as f64));
        first_hit.push(1.0 / ranks[0] as f64);
    }
    let avg = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    (avg(&recalls), avg(&per_positive), avg(&first_hit))
}

#[test]
fn metrics_match_brute_force_oracles() {
    for seed in 0..200 {
        let s = fixture(seed);
        let m = rank_metrics(&s, 10, MrrMode::PerPositive).unwrap();
        let first = rank_metrics(&s, 10, MrrMode::FirstHit).unwrap();
        let (recall, mrr, mrr_first) = ranking_oracles(&s, 10);
        assert_eq!(m.f1, f1_oracle(&s), "f1 seed {seed}");
        assert_eq!(m.roc_auc, auc_oracle(&s), "auc seed {seed}");
        assert_eq!(m.recall_at_10, recall, "recall seed {seed}");
        assert_eq!(m.mrr, mrr, "mrr seed {seed}");
        assert_eq!(first.mrr, mrr_first, "first-hit mrr seed {seed}");
    }
}

#[test]
fn binary_evaluation_matches_oracles() {
    for seed in 0..200 {
        let s = fixture(seed + 1000);
        let pairs: Vec<(f64, bool)> = s.iter().map(|x| (x.score, x.label)).collect();
        assert_eq!(roc_auc(&pairs), auc_oracle(&s));
        assert_eq!(evaluate_binary(&pairs, F1_THRESHOLD).f1, f1_oracle(&s));
    }
}

#[test]
fn analytic_gradient_matches_finite_differences() {
    for seed in 0..20 {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let dim = r.random_range(2..12);
        let examples: Vec<LabeledExample> = (0..r.random_range(3..25))
            .map(|i| {
                let entries: Vec<(usize, f64)> = (0..dim)
                    .filter_map(|j| r.random_bool(0.5).then(|| (j, r.random_range(-2.0..2.0))))
                    .collect();
                LabeledExample::new(format!("x{i}"), SparseVector::from_pairs(entries), r.random_bool(0.5))
            })
            .collect();
        let config = TrainConfig {
            l2_lambda: r.random_range(0.0..0.1),
            seed,
            ..Default::default()
        };
        let gap = gradient_check(&examples, dim, &config);
        assert!(gap <= 1e-4, "seed {seed}: gap {gap}");
    }
}
