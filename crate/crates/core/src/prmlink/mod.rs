//! The link cascade: article-level attribute steps with optional gates,
//! a final article/policy similarity, threshold calibration on gold pairs,
//! evaluation and ablation.

mod build;
mod calibrate;
mod chain;
mod external;
mod funnel;
mod output;
mod rules;

pub use build::{
    build_standard_chain, ChainConfig, ChainTrainingReport, RecentVoteScorer, TrainedChain, BODY_STEP, RECENT_STEP,
    VOTES_STEP,
};
pub use calibrate::{calibrate_lambda, evaluate_links, evaluation_universe, gold_pairs, LambdaCalibration, PairSet};
pub use chain::{ablate_chain, ChainStep, FinalSimilarity, LinkScore, PrmChain, SimilarityTarget, StepOutput, StepScorer};
pub use external::{
    parse_completion, CachedAnswer, Exemplar, ExternalConfig, ExternalYesNoClient, PromptTemplate, API_KEY_VAR,
    ENDPOINT_VAR, EXEMPLAR_SLOTS, MODEL_VAR,
};
pub use funnel::run_funnel;
pub use output::{emit_links, read_link_pairs, write_links_csv, write_scores_csv, LinkSet};
pub use rules::{date_mentions, RecentVoteRule};
