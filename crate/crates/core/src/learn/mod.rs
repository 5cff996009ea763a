//! Deterministic binary classification over sparse vectors, binary metrics,
//! and keyword-seeded bootstrapping of article classifiers.

mod bootstrap;
mod logistic;
mod metrics;

pub use bootstrap::{bootstrap_from_keyword, delete_keyword, BootstrapConfig, BootstrapOutcome};
pub use logistic::{
    gradient_check, predict_proba, regularized_loss, train_logistic, train_logistic_traced, LabeledExample,
    LogisticModel, TrainConfig,
};
pub use metrics::{evaluate_binary, f1_score, roc_auc, Counts, EvalReport};
