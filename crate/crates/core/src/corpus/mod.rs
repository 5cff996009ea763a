//! Corpus schemas, JSONL ingestion with deduplication, time-windowed
//! candidate pairs, agenda reconciliation and the synthetic corpus generator.

mod ingest;
mod pairs;
mod reconcile;
mod schema;
mod store;
pub mod synth;

pub use ingest::{ingest, ingest_reader, read_jsonl, write_jsonl, IngestReport, InvalidLine, Record, RecordKind};
pub use pairs::{candidate_pairs, DEFAULT_WINDOW_DAYS};
pub use reconcile::{reconcile_agenda_coverage, reconcile_with_coverage, ReconciliationReport};
pub use schema::{
    normalize_body, AgendaItem, Annotation, Article, CandidatePair, GoldPair, Meeting, PolicyItem, Split,
    TranscriptSegment,
};
pub use store::CorpusStore;
pub use synth::{generate_synthetic_corpus, SynthParams, SyntheticCorpus};
