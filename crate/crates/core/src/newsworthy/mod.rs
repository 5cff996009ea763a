//! Newsworthiness prediction: coverage labels, per-meeting policy features,
//! prompt assembly, temporal splits, a prompt-text ranker, ranking metrics
//! and ablation grids over prompt sections and training cutoffs.

mod features;
mod grid;
mod metrics;
mod prompt;
mod ranker;
mod split;
mod synth;

pub use features::{build_dataset, extract_features, make_labels, LinkIndex, NewsworthyExample};
pub use grid::{run_cutoff_grid, run_section_grid, write_grid_csv, GridRow, GridSettings};
pub use metrics::{
    eval_ranker, group_by_meeting, rank_meeting, rank_metrics, score_prompts, MrrMode, RankMetrics, RankedEntry,
    RankedList, ScoredPrompt, DEFAULT_K, F1_THRESHOLD,
};
pub use prompt::{assemble_prompt, truncate_words, PromptConfig, PromptRecord, PromptSections, QUESTION};
pub use ranker::{ranker_tokenizer, train_ranker, PromptScorer, RankerModel};
pub use split::{balance, temporal_split, SplitConfig};
pub use synth::{generate_newsworthy_dataset, NewsworthySynthParams};
