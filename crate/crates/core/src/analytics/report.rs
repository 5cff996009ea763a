use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::chart::{Chart, ChartKind};
use super::coverage::{coverage_stats, CountHistogram, CoverageStats};
use super::delta::{delta_words, DeltaWordTable};
use super::discussion::{discussion_comparison, ClassMeans, DiscussionComparison};
use super::lda::{lda_fit, LdaConfig, TopicRanking, topic_newsworthiness};
use crate::corpus::{CorpusStore, DEFAULT_WINDOW_DAYS};
use crate::error::{Error, Result};
use crate::newsworthy::{make_labels, NewsworthyExample};
use crate::textvec::{tokenize_with, TokenizerConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalyticsConfig {
    pub window_days: u32,
    /// Rows kept at each end of the delta-word table.
    pub top_n: usize,
    pub words_bin_width: usize,
    pub lda: LdaConfig,
    /// Words listed per topic.
    pub top_m: usize,
}

impl Default for AnalyticsConfig {
    fn default() -> Self {
        Self {
            window_days: DEFAULT_WINDOW_DAYS,
            top_n: 20,
            words_bin_width: 50,
            lda: LdaConfig::default(),
            top_m: 10,
        }
    }
}

/// Everything the report writer can emit; absent parts are skipped.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AnalyticsReport {
    pub coverage: Option<CoverageStats>,
    pub delta: Option<DeltaWordTable>,
    pub comparison: Option<DiscussionComparison>,
    pub topics: Option<TopicRanking>,
    /// Why a part is missing.
    pub notes: Vec<String>,
}

/// Computes every report part that the inputs support. Policy texts are the
/// documents for the delta table and the topic model; labels come from the
/// link set.
pub fn analyze<'a>(
    store: &CorpusStore,
    links: &[(&'a str, &'a str)],
    examples: &[NewsworthyExample],
    config: &AnalyticsConfig,
) -> Result<AnalyticsReport> {
    let mut report = AnalyticsReport {
        coverage: Some(coverage_stats(links.iter().copied(), store, config.window_days)?),
        ..Default::default()
    };
    let labels = make_labels(store.policies(), links.iter().map(|l| l.1));
    let tokenizer = TokenizerConfig::default().with_stopwords_removed();
    let texts: Vec<(String, bool)> = store.policies().iter().map(|p| (p.text(), labels[&p.id])).collect();
    let pos: Vec<&str> = texts.iter().filter(|t| t.1).map(|t| t.0.as_str()).collect();
    let neg: Vec<&str> = texts.iter().filter(|t| !t.1).map(|t| t.0.as_str()).collect();

    match delta_words(&pos, &neg, tokenizer) {
        Ok(t) => report.delta = Some(t),
        Err(e) => report.notes.push(format!("delta words skipped: {e}")),
    }
    report.comparison = Some(discussion_comparison(examples, config.words_bin_width)?);

    let docs: Vec<Vec<String>> = texts.iter().map(|t| tokenize_with(&t.0, tokenizer)).collect();
    let flags: Vec<bool> = texts.iter().map(|t| t.1).collect();
    match lda_fit(&docs, &config.lda).and_then(|m| topic_newsworthiness(&m, &flags, config.top_m)) {
        Ok(r) => report.topics = Some(r),
        Err(e) => report.notes.push(format!("topic model skipped: {e}")),
    }
    Ok(report)
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    fn write(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

fn histogram_table(h: &CountHistogram) -> Table {
    let mut t = Table::new(&["value", "count"]);
    t.rows = h.buckets.iter().map(|b| vec![b.value.to_string(), b.count.to_string()]).collect();
    t
}

fn histogram_chart(h: &CountHistogram, title: &str, x_label: &str) -> Chart {
    Chart::new(ChartKind::Bar, title, x_label, "policies")
        .with_points(h.buckets.iter().map(|b| (b.value as f64, b.count as f64)).collect())
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes CSVs and SVG charts under `out_dir` and returns the paths written,
/// in a fixed order. Charts are skipped for empty data.
pub fn emit_reports(report: &AnalyticsReport, out_dir: impl AsRef<Path>, top_n: usize) -> Result<Vec<PathBuf>> {
    let dir = out_dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let put_table = |name: &str, t: &Table, written: &mut Vec<PathBuf>| -> Result<()> {
        let path = dir.join(name);
        t.write(&path)?;
        written.push(path);
        Ok(())
    };
    let put_chart = |name: &str, c: &Chart, written: &mut Vec<PathBuf>| -> Result<()> {
        if let Some(svg) = c.to_svg() {
            let path = dir.join(name);
            fs::write(&path, svg).map_err(|e| Error::io(&path, e))?;
            written.push(path);
        }
        Ok(())
    };

    if let Some(cov) = &report.coverage {
        let mut t = Table::new(&["meeting_id", "date", "n_proposed", "n_covered", "fraction"]);
        t.rows = cov
            .series
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.meeting_id.clone(),
                    r.date.to_string(),
                    r.n_proposed.to_string(),
                    r.n_covered.to_string(),
                    r.fraction.to_string(),
                ]
            })
            .collect();
        put_table("coverage_series.csv", &t, &mut written)?;
        let mut series = Chart::new(ChartKind::Line, "Policies covered per meeting", "meeting date", "fraction covered")
            .with_points(cov.series.rows.iter().enumerate().map(|(i, r)| (i as f64, r.fraction)).collect());
        if let (Some(first), Some(last)) = (cov.series.rows.first(), cov.series.rows.last()) {
            series.x_tick_labels = Some((first.date.to_string(), last.date.to_string()));
        }
        put_chart("coverage_series.svg", &series, &mut written)?;

        put_table("articles_per_policy.csv", &histogram_table(&cov.articles_per_policy), &mut written)?;
        put_chart(
            "articles_per_policy.svg",
            &histogram_chart(&cov.articles_per_policy, "Linked articles per policy", "articles"),
            &mut written,
        )?;
        put_table("meetings_per_policy.csv", &histogram_table(&cov.meetings_per_policy), &mut written)?;
        put_chart(
            "meetings_per_policy.svg",
            &histogram_chart(&cov.meetings_per_policy, "Meetings per policy", "meetings"),
            &mut written,
        )?;

        let mut summary = Table::new(&["statistic", "value"]);
        summary.rows = [
            ("window_days", cov.window_days.to_string()),
            ("n_policies", cov.n_policies.to_string()),
            ("n_linked_policies", cov.n_linked_policies.to_string()),
            ("overall_fraction", cov.series.overall_fraction().to_string()),
            ("articles_per_policy_mean", cov.articles_per_policy.mean.to_string()),
            ("articles_per_policy_median", cov.articles_per_policy.median.to_string()),
            ("meetings_per_policy_mean", cov.meetings_per_policy.mean.to_string()),
            ("meetings_per_policy_median", cov.meetings_per_policy.median.to_string()),
        ]
        .into_iter()
        .map(|(k, v)| vec![k.to_string(), v])
        .collect();
        put_table("coverage_summary.csv", &summary, &mut written)?;
    }

    if let Some(delta) = &report.delta {
        let mut t = Table::new(&["word", "delta_x100"]);
        t.rows = delta.extremes(top_n).into_iter().map(|r| vec![r.word.clone(), r.delta.to_string()]).collect();
        put_table("delta_words.csv", &t, &mut written)?;
    }

    if let Some(cmp) = &report.comparison {
        let mut t = Table::new(&["class", "n", "mean_minutes", "mean_words", "mean_speakers", "mean_public_commenters"]);
        let row = |name: &str, m: Option<ClassMeans>| {
            vec![
                name.to_string(),
                m.map(|m| m.n.to_string()).unwrap_or_default(),
                opt(m.map(|m| m.minutes)),
                opt(m.map(|m| m.words)),
                opt(m.map(|m| m.speakers)),
                opt(m.map(|m| m.public_commenters)),
            ]
        };
        t.rows = vec![row("newsworthy", cmp.positive), row("not_newsworthy", cmp.negative)];
        put_table("discussion_comparison.csv", &t, &mut written)?;

        let mut words = Table::new(&["words_from", "words_to", "n_newsworthy", "n_not_newsworthy"]);
        words.rows = cmp
            .words_distribution
            .iter()
            .map(|b| vec![b.lo.to_string(), b.hi.to_string(), b.n_positive.to_string(), b.n_negative.to_string()])
            .collect();
        put_table("words_per_policy.csv", &words, &mut written)?;
    }

    if let Some(topics) = &report.topics {
        let mut t = Table::new(&["rank", "topic", "n_docs", "n_newsworthy", "fraction", "top_words"]);
        t.rows = topics
            .ranked
            .iter()
            .enumerate()
            .map(|(i, a)| {
                vec![
                    (i + 1).to_string(),
                    a.topic.to_string(),
                    a.n_docs.to_string(),
                    a.n_positive.to_string(),
                    a.fraction.to_string(),
                    a.top_words.join(" "),
                ]
            })
            .collect();
        t.rows.extend(
            topics
                .excluded
                .iter()
                .map(|t| vec![String::new(), t.to_string(), "0".into(), "0".into(), String::new(), String::new()]),
        );
        put_table("topics.csv", &t, &mut written)?;
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::coverage::CoverageSeries;

    #[test]
    fn empty_series_writes_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let report = AnalyticsReport {
            coverage: Some(CoverageStats {
                window_days: 31,
                series: CoverageSeries::default(),
                articles_per_policy: CountHistogram::default(),
                meetings_per_policy: CountHistogram::default(),
                n_policies: 0,
                n_linked_policies: 0,
            }),
            ..Default::default()
        };
        let paths = emit_reports(&report, dir.path(), 5).unwrap();
        assert!(paths.iter().all(|p| p.extension().unwrap() == "csv"));
        let text = fs::read_to_string(dir.path().join("coverage_series.csv")).unwrap();
        assert_eq!(text, "meeting_id,date,n_proposed,n_covered,fraction\n");
    }
}
