use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl Counts {
    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn f1(&self) -> f64 {
        f1_score(self.precision(), self.recall())
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Harmonic mean, zero when both inputs are zero.
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub f1: f64,
    pub precision: f64,
    pub recall: f64,
    pub roc_auc: f64,
    pub threshold: f64,
    pub counts: Counts,
}

impl EvalReport {
    pub fn from_counts(counts: Counts, roc_auc: f64, threshold: f64) -> Self {
        Self {
            f1: counts.f1(),
            precision: counts.precision(),
            recall: counts.recall(),
            roc_auc,
            threshold,
            counts,
        }
    }
}

/// Thresholded metrics (`score >= threshold` predicts positive) plus ROC-AUC.
pub fn evaluate_binary(scores: &[(f64, bool)], threshold: f64) -> EvalReport {
    let mut counts = Counts::default();
    for &(s, label) in scores {
        match (s >= threshold, label) {
            (true, true) => counts.tp += 1,
            (true, false) => counts.fp += 1,
            (false, true) => counts.fn_ += 1,
            (false, false) => counts.tn += 1,
        }
    }
    EvalReport::from_counts(counts, roc_auc(scores), threshold)
}

/// Mann-Whitney ROC-AUC with tied scores contributing ½. Returns 0.5 when
/// either class is absent.
pub fn roc_auc(scores: &[(f64, bool)]) -> f64 {
    let n_pos = scores.iter().filter(|s| s.1).count();
    let n_neg = scores.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return 0.5;
    }
    let mut sorted: Vec<(f64, bool)> = scores.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    // sum of midranks of positives
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1].0 == sorted[i].0 {
            j += 1;
        }
        let midrank = (i + j) as f64 / 2.0 + 1.0;
        let pos_in_group = sorted[i..=j].iter().filter(|s| s.1).count();
        rank_sum += midrank * pos_in_group as f64;
        i = j + 1;
    }
    let u = rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    u / (n_pos as f64 * n_neg as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hand_counts_f1() {
        let c = Counts {
            tp: 2,
            fp: 1,
            fn_: 1,
            tn: 0,
        };
        assert_relative_eq!(c.precision(), 2.0 / 3.0);
        assert_relative_eq!(c.recall(), 2.0 / 3.0);
        assert_relative_eq!(c.f1(), 2.0 / 3.0);
    }

    #[test]
    fn zero_convention() {
        assert_eq!(Counts::default().f1(), 0.0);
        assert_eq!(f1_score(0.0, 0.0), 0.0);
    }

    #[test]
    fn perfect_separation_auc_one() {
        let s = [(0.9, true), (0.8, true), (0.2, false), (0.1, false)];
        assert_eq!(roc_auc(&s), 1.0);
    }

    #[test]
    fn auc_half_example() {
        let s = [(0.9, true), (0.8, false), (0.3, true)];
        assert_eq!(roc_auc(&s), 0.5);
    }

    #[test]
    fn ties_count_half() {
        let s = [(0.5, true), (0.5, false)];
        assert_eq!(roc_auc(&s), 0.5);
        let s = [(0.5, true), (0.5, false), (0.1, false)];
        assert_eq!(roc_auc(&s), 0.75);
    }

    #[test]
    fn threshold_is_inclusive() {
        let r = evaluate_binary(&[(0.5, true), (0.4, false)], 0.5);
        assert_eq!(r.counts.tp, 1);
        assert_eq!(r.f1, 1.0);
    }
}
