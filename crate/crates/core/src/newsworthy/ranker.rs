use serde::{Deserialize, Serialize};

use super::prompt::PromptRecord;
use crate::error::{Error, Result};
use crate::learn::{train_logistic, LabeledExample, LogisticModel, TrainConfig};
use crate::prmlink::ExternalYesNoClient;
use crate::textvec::{TfIdfModel, TokenizerConfig};

/// Anything that maps a rendered prompt to a newsworthiness probability.
pub trait PromptScorer: Sync {
    fn score(&self, prompt: &str) -> Result<f64>;
}

/// Logistic regression over TF-IDF of the prompt text. Digits are kept as
/// tokens so rendered counts act as features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankerModel {
    pub space: TfIdfModel,
    pub model: LogisticModel,
}

impl PromptScorer for RankerModel {
    fn score(&self, prompt: &str) -> Result<f64> {
        Ok(self.model.predict_proba(&self.space.transform(prompt)))
    }
}

impl PromptScorer for ExternalYesNoClient {
    fn score(&self, prompt: &str) -> Result<f64> {
        self.answer(prompt).map(|a| a.prob)
    }
}

pub fn ranker_tokenizer() -> TokenizerConfig {
    TokenizerConfig::default().keep_numbers()
}

pub fn train_ranker(train: &[PromptRecord], config: TrainConfig) -> Result<RankerModel> {
    if train.is_empty() {
        return Err(Error::EmptySplit("ranker train"));
    }
    let texts: Vec<&str> = train.iter().map(|r| r.text.as_str()).collect();
    let space = TfIdfModel::fit(&texts, ranker_tokenizer())?;
    let examples: Vec<LabeledExample> = train
        .iter()
        .map(|r| LabeledExample::new(format!("{}/{}", r.meeting_id, r.policy_id), space.transform(&r.text), r.label))
        .collect();
    let model = train_logistic(&examples, Some(space.dim()), config)?;
    Ok(RankerModel { space, model })
}
