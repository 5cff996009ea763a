use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::textvec::SparseVector;
use crate::util::{rng, sigmoid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub id: String,
    pub features: SparseVector,
    pub label: bool,
}

impl LabeledExample {
    pub fn new(id: impl Into<String>, features: SparseVector, label: bool) -> Self {
        Self {
            id: id.into(),
            features,
            label,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Coefficient of `(λ/2)‖w‖²`; the bias is not penalized.
    pub l2_lambda: f64,
    pub learning_rate: f64,
    pub max_iters: usize,
    /// Stop once the absolute decrease in loss falls below this.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            l2_lambda: 1e-4,
            learning_rate: 2.0,
            max_iters: 2000,
            tolerance: 1e-7,
            seed: 0,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters must be at least 1"));
        }
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::invalid("learning_rate must be positive"));
        }
        if !(self.l2_lambda >= 0.0) {
            return Err(Error::invalid("l2_lambda must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    #[serde(with = "sparse_weights")]
    pub weights: Vec<f64>,
    pub bias: f64,
    pub config: TrainConfig,
    /// Gradient steps actually taken.
    pub iterations: usize,
}

impl LogisticModel {
    /// Model with all-zero parameters; predicts 0.5 everywhere.
    pub fn zeros(n_features: usize) -> Self {
        Self {
            weights: vec![0.0; n_features],
            bias: 0.0,
            config: TrainConfig::default(),
            iterations: 0,
        }
    }

    pub fn decision(&self, x: &SparseVector) -> f64 {
        x.dot_dense(&self.weights) + self.bias
    }

    pub fn predict_proba(&self, x: &SparseVector) -> f64 {
        sigmoid(self.decision(x))
    }
}

pub fn predict_proba(model: &LogisticModel, x: &SparseVector) -> f64 {
    model.predict_proba(x)
}

/// Mean log loss plus `(λ/2)‖w‖²`.
pub fn regularized_loss(examples: &[LabeledExample], weights: &[f64], bias: f64, l2_lambda: f64) -> f64 {
    let n = examples.len().max(1) as f64;
    let data: f64 = examples
        .iter()
        .map(|e| {
            let z = e.features.dot_dense(weights) + bias;
            log_loss(z, e.label)
        })
        .sum::<f64>()
        / n;
    let penalty = 0.5 * l2_lambda * weights.iter().map(|w| w * w).sum::<f64>();
    data + penalty
}

/// `-log σ(z)` for positives, `-log(1-σ(z))` for negatives, computed stably.
fn log_loss(z: f64, label: bool) -> f64 {
    let s = if label { -z } else { z };
    // log(1 + e^s)
    if s > 0.0 {
        s + (-s).exp().ln_1p()
    } else {
        s.exp().ln_1p()
    }
}

fn gradient(examples: &[LabeledExample], weights: &[f64], bias: f64, l2_lambda: f64) -> (Vec<f64>, f64) {
    let n = examples.len().max(1) as f64;
    let mut grad = vec![0.0; weights.len()];
    let mut grad_b = 0.0;
    for e in examples {
        let z = e.features.dot_dense(weights) + bias;
        let residual = sigmoid(z) - if e.label { 1.0 } else { 0.0 };
        for (i, x) in e.features.iter() {
            if i < grad.len() {
                grad[i] += residual * x;
            }
        }
        grad_b += residual;
    }
    for (g, w) in grad.iter_mut().zip(weights) {
        *g = *g / n + l2_lambda * w;
    }
    (grad, grad_b / n)
}

fn check_classes(examples: &[LabeledExample]) -> Result<()> {
    let pos = examples.iter().filter(|e| e.label).count();
    if pos == 0 || pos == examples.len() {
        return Err(Error::SingleClass);
    }
    Ok(())
}

fn infer_dim(examples: &[LabeledExample]) -> usize {
    examples.iter().map(|e| e.features.dim_hint()).max().unwrap_or(0)
}

/// Full-batch gradient descent from zero initialization.
///
/// `n_features` is the width of the weight vector; pass `None` to size it
/// from the largest index seen.
pub fn train_logistic(examples: &[LabeledExample], n_features: Option<usize>, config: TrainConfig) -> Result<LogisticModel> {
    train_logistic_traced(examples, n_features, config).map(|(m, _)| m)
}

/// Like [`train_logistic`], also returning the loss before each update and
/// the final loss.
pub fn train_logistic_traced(
    examples: &[LabeledExample],
    n_features: Option<usize>,
    config: TrainConfig,
) -> Result<(LogisticModel, Vec<f64>)> {
    config.validate()?;
    check_classes(examples)?;
    let dim = n_features.unwrap_or_else(|| infer_dim(examples)).max(infer_dim(examples));
    let mut weights = vec![0.0; dim];
    let mut bias = 0.0;
    let mut trace = Vec::with_capacity(config.max_iters.min(10_000) + 1);
    let mut loss = regularized_loss(examples, &weights, bias, config.l2_lambda);
    trace.push(loss);
    let mut iterations = 0;
    for it in 0..config.max_iters {
        let (grad, grad_b) = gradient(examples, &weights, bias, config.l2_lambda);
        for (w, g) in weights.iter_mut().zip(&grad) {
            *w -= config.learning_rate * g;
        }
        bias -= config.learning_rate * grad_b;
        iterations = it + 1;
        let next = regularized_loss(examples, &weights, bias, config.l2_lambda);
        if !next.is_finite() {
            return Err(Error::NonFiniteLoss { iteration: iterations });
        }
        trace.push(next);
        let delta = (loss - next).abs();
        loss = next;
        if delta < config.tolerance {
            break;
        }
    }
    Ok((
        LogisticModel {
            weights,
            bias,
            config,
            iterations,
        },
        trace,
    ))
}

/// Largest absolute gap between the analytic gradient of
/// [`regularized_loss`] and central finite differences (h = 1e-5), evaluated
/// at a seeded random parameter point.
pub fn gradient_check(examples: &[LabeledExample], n_features: usize, config: &TrainConfig) -> f64 {
    use rand::Rng;
    let mut r = rng(config.seed);
    let weights: Vec<f64> = (0..n_features).map(|_| r.random_range(-1.0..1.0)).collect();
    let bias: f64 = r.random_range(-1.0..1.0);
    gradient_check_at(examples, &weights, bias, config.l2_lambda)
}

pub(crate) fn gradient_check_at(examples: &[LabeledExample], weights: &[f64], bias: f64, l2_lambda: f64) -> f64 {
    const H: f64 = 1e-5;
    let (grad, grad_b) = gradient(examples, weights, bias, l2_lambda);
    let mut worst: f64 = 0.0;
    let mut w = weights.to_vec();
    for i in 0..w.len() {
        let orig = w[i];
        w[i] = orig + H;
        let up = regularized_loss(examples, &w, bias, l2_lambda);
        w[i] = orig - H;
        let down = regularized_loss(examples, &w, bias, l2_lambda);
        w[i] = orig;
        worst = worst.max(((up - down) / (2.0 * H) - grad[i]).abs());
    }
    let up = regularized_loss(examples, &w, bias + H, l2_lambda);
    let down = regularized_loss(examples, &w, bias - H, l2_lambda);
    worst.max(((up - down) / (2.0 * H) - grad_b).abs())
}

mod sparse_weights {
    //! Weights are stored as `{"dim": V, "nonzero": [[i, w], ...]}`.
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Encoded {
        dim: usize,
        nonzero: Vec<(usize, f64)>,
    }

    pub fn serialize<S: Serializer>(w: &[f64], s: S) -> Result<S::Ok, S::Error> {
        Encoded {
            dim: w.len(),
            nonzero: w.iter().copied().enumerate().filter(|&(_, x)| x != 0.0).collect(),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let enc = Encoded::deserialize(d)?;
        let mut w = vec![0.0; enc.dim];
        for (i, x) in enc.nonzero {
            if i >= enc.dim {
                return Err(serde::de::Error::custom(format!("weight index {i} >= dim {}", enc.dim)));
            }
            w[i] = x;
        }
        Ok(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;

    fn x(v: &[(usize, f64)]) -> SparseVector {
        SparseVector::from_pairs(v.to_vec())
    }

    fn separable_1d() -> Vec<LabeledExample> {
        vec![
            LabeledExample::new("neg", x(&[(0, -1.0)]), false),
            LabeledExample::new("pos", x(&[(0, 1.0)]), true),
        ]
    }

    fn random_fixture(seed: u64, n: usize, dim: usize) -> Vec<LabeledExample> {
        let mut r = rng(seed);
        let mut out: Vec<LabeledExample> = (0..n)
            .map(|i| {
                let pairs = (0..dim)
                    .filter_map(|j| r.random_bool(0.4).then(|| (j, r.random_range(-2.0..2.0))))
                    .collect();
                LabeledExample::new(format!("e{i}"), SparseVector::from_pairs(pairs), r.random_bool(0.5))
            })
            .collect();
        out[0].label = true;
        out[1].label = false;
        out
    }

    #[test]
    fn separates_1d_data() {
        let cfg = TrainConfig {
            l2_lambda: 0.01,
            ..TrainConfig::default()
        };
        let data = separable_1d();
        let m = train_logistic(&data, Some(1), cfg).unwrap();
        for e in &data {
            assert_eq!(m.predict_proba(&e.features) >= 0.5, e.label);
        }
    }

    #[test]
    fn max_iters_one_runs_one_update() {
        let cfg = TrainConfig {
            max_iters: 1,
            ..TrainConfig::default()
        };
        let m = train_logistic(&separable_1d(), Some(1), cfg).unwrap();
        assert_eq!(m.iterations, 1);
        // one step from zero: w = -lr * mean((0.5-y) x) = lr * 0.5
        assert_relative_eq!(m.weights[0], cfg.learning_rate * 0.5, epsilon = 1e-12);
        let zero = TrainConfig {
            max_iters: 0,
            ..TrainConfig::default()
        };
        assert!(train_logistic(&separable_1d(), Some(1), zero).is_err());
    }

    #[test]
    fn single_class_rejected() {
        let data = vec![LabeledExample::new("a", x(&[(0, 1.0)]), true)];
        assert!(matches!(train_logistic(&data, None, TrainConfig::default()), Err(Error::SingleClass)));
    }

    #[test]
    fn diverging_learning_rate_reports_non_finite_loss() {
        let data = vec![
            LabeledExample::new("a", x(&[(0, 1e150)]), true),
            LabeledExample::new("b", x(&[(0, -1e150)]), false),
            LabeledExample::new("c", x(&[(0, 1e150)]), false),
        ];
        let cfg = TrainConfig {
            learning_rate: 1e200,
            l2_lambda: 1.0,
            ..TrainConfig::default()
        };
        assert!(matches!(train_logistic(&data, None, cfg), Err(Error::NonFiniteLoss { .. })));
    }

    #[test]
    fn duplicated_dataset_has_identical_loss_and_boundary() {
        let data = random_fixture(7, 10, 6);
        let doubled: Vec<_> = data.iter().flat_map(|e| [e.clone(), e.clone()]).collect();
        let mut r = rng(3);
        for _ in 0..5 {
            let w: Vec<f64> = (0..6).map(|_| r.random_range(-1.0..1.0)).collect();
            let b = r.random_range(-1.0..1.0);
            let a = regularized_loss(&data, &w, b, 0.05);
            let d = regularized_loss(&doubled, &w, b, 0.05);
            assert_relative_eq!(a, d, epsilon = 1e-12);
        }
        let cfg = TrainConfig {
            l2_lambda: 0.05,
            max_iters: 300,
            ..TrainConfig::default()
        };
        let m1 = train_logistic(&data, Some(6), cfg).unwrap();
        let m2 = train_logistic(&doubled, Some(6), cfg).unwrap();
        for (a, b) in m1.weights.iter().zip(&m2.weights) {
            assert_relative_eq!(a, b, epsilon = 1e-9);
        }
        assert_relative_eq!(m1.bias, m2.bias, epsilon = 1e-9);
    }

    #[test]
    fn zero_model_predicts_half() {
        let m = LogisticModel::zeros(4);
        assert_eq!(m.predict_proba(&x(&[(1, 3.0), (3, -2.0)])), 0.5);
    }

    #[test]
    fn hand_set_model() {
        let mut m = LogisticModel::zeros(1);
        m.weights[0] = 1.0;
        assert_relative_eq!(m.predict_proba(&x(&[(0, 1.0)])), 0.7310585786300049, epsilon = 1e-12);
    }

    #[test]
    fn proba_monotone_and_saturating() {
        let mut m = LogisticModel::zeros(1);
        m.weights[0] = 1.0;
        let mut prev = 0.0;
        for k in 0..60 {
            let p = m.predict_proba(&x(&[(0, k as f64)]));
            assert!(p >= prev && p < 1.0 + f64::EPSILON);
            prev = p;
        }
        assert!(prev > 1.0 - 1e-12);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let data = random_fixture(11, 10, 8);
        let cfg = TrainConfig {
            l2_lambda: 0.1,
            seed: 5,
            ..TrainConfig::default()
        };
        assert!(gradient_check(&data, 8, &cfg) < 1e-4);
    }

    #[test]
    fn bias_gradient_closed_form_at_origin() {
        let data = vec![LabeledExample::new("z", SparseVector::zero(), true)];
        let b = 0.3;
        let (_, gb) = gradient(&data, &[0.0, 0.0], b, 0.0);
        assert_eq!(gb, sigmoid(b) - 1.0);
    }

    #[test]
    fn gradient_check_order_invariant() {
        let data = random_fixture(13, 10, 5);
        let mut rev = data.clone();
        rev.reverse();
        let cfg = TrainConfig {
            seed: 2,
            ..TrainConfig::default()
        };
        let a = gradient_check(&data, 5, &cfg);
        let b = gradient_check(&rev, 5, &cfg);
        assert!((a - b).abs() < 1e-6);
    }

    #[test]
    fn loss_non_increasing_and_deterministic() {
        let data: Vec<_> = random_fixture(21, 40, 10)
            .into_iter()
            .map(|mut e| {
                e.features = e.features.normalized();
                e
            })
            .collect();
        let cfg = TrainConfig::default();
        let (m1, trace) = train_logistic_traced(&data, Some(10), cfg).unwrap();
        assert!(trace.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        let m2 = train_logistic(&data, Some(10), cfg).unwrap();
        assert_eq!(m1, m2);
        assert!(m1.weights.iter().all(|w| w.is_finite()));
    }

    #[test]
    fn json_round_trip() {
        let m = train_logistic(&separable_1d(), Some(3), TrainConfig::default()).unwrap();
        let back: LogisticModel = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(m, back);
    }
}
