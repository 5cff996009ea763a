//! Descriptive statistics over a linked corpus: per-meeting coverage,
//! class-conditional word deltas, discussion-length comparisons, LDA topics
//! and their association with coverage, plus CSV and SVG report output.

mod chart;
mod coverage;
mod delta;
mod discussion;
mod lda;
mod report;

pub use chart::{AxisRange, Chart, ChartKind};
pub use coverage::{coverage_stats, CountHistogram, CoverageRow, CoverageSeries, CoverageStats, HistogramBucket};
pub use delta::{delta_words, DeltaWord, DeltaWordTable, DELTA_SCALE};
pub use discussion::{discussion_comparison, ClassMeans, DiscussionComparison, WordsBucket};
pub use lda::{lda_fit, lda_fit_with, topic_newsworthiness, LdaConfig, TopicAssociation, TopicModel, TopicRanking};
pub use report::{analyze, emit_reports, AnalyticsConfig, AnalyticsReport};
