//! Link local news coverage to the policy proposals it reports on, align
//! meeting transcripts with their agendas, and rank each meeting's policies by
//! how likely they are to be covered.
//!
//! The crate is organised as a pipeline:
//!
//! - [`corpus`]: record schemas, JSONL ingestion, candidate windows and a
//!   seeded synthetic corpus generator.
//! - [`textvec`]: tokenizer, TF-IDF space, cosine similarity, word distributions.
//! - [`learn`]: L2 logistic regression, binary metrics, keyword bootstrapping.
//! - [`prmlink`]: the article/policy link cascade, threshold calibration and ablation.
//! - [`meetings`]: transition labelling, agenda pegging, section rollups and
//!   public-comment attribution.
//! - [`newsworthy`]: per-policy features, prompt assembly, temporal splits,
//!   rankers and ablation grids.
//! - [`analytics`]: coverage series, word-distribution deltas, LDA topics, reports.

pub mod analytics;
pub mod corpus;
pub mod error;
pub mod learn;
pub mod meetings;
pub mod newsworthy;
pub mod prmlink;
pub mod textvec;
pub(crate) mod util;

pub use error::{Error, Result};
