use std::collections::{BTreeMap, BTreeSet, HashMap};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::corpus::CorpusStore;
use crate::error::{Error, Result};
use crate::util::{mean, median};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageRow {
    pub meeting_id: String,
    pub date: NaiveDate,
    pub n_proposed: usize,
    pub n_covered: usize,
    pub fraction: f64,
}

/// One row per meeting, in date order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CoverageSeries {
    pub rows: Vec<CoverageRow>,
}

impl CoverageSeries {
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Pooled fraction over all meetings.
    pub fn overall_fraction(&self) -> f64 {
        let proposed: usize = self.rows.iter().map(|r| r.n_proposed).sum();
        let covered: usize = self.rows.iter().map(|r| r.n_covered).sum();
        if proposed == 0 {
            0.0
        } else {
            covered as f64 / proposed as f64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramBucket {
    pub value: usize,
    pub count: usize,
}

/// Histogram of a non-negative count with one bucket per value in `0..=max`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CountHistogram {
    pub buckets: Vec<HistogramBucket>,
    pub mean: f64,
    pub median: f64,
}

impl CountHistogram {
    pub fn from_values(values: &[usize]) -> Self {
        let max = values.iter().copied().max();
        let mut buckets: Vec<HistogramBucket> = match max {
            Some(m) => (0..=m).map(|value| HistogramBucket { value, count: 0 }).collect(),
            None => Vec::new(),
        };
        for &v in values {
            buckets[v].count += 1;
        }
        let as_f: Vec<f64> = values.iter().map(|&v| v as f64).collect();
        Self {
            buckets,
            mean: mean(&as_f),
            median: median(&as_f),
        }
    }

    pub fn total(&self) -> usize {
        self.buckets.iter().map(|b| b.count).sum()
    }

    pub fn count(&self, value: usize) -> usize {
        self.buckets.get(value).map_or(0, |b| b.count)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageStats {
    pub window_days: u32,
    pub series: CoverageSeries,
    /// Linked articles per policy, zero for unlinked policies.
    pub articles_per_policy: CountHistogram,
    /// Meetings per policy, from each policy's meeting list.
    pub meetings_per_policy: CountHistogram,
    pub n_policies: usize,
    pub n_linked_policies: usize,
}

/// A policy counts as covered at a meeting when one of its linked articles
/// was published within `window_days` after that meeting (same day included).
pub fn coverage_stats<'a>(
    links: impl IntoIterator<Item = (&'a str, &'a str)>,
    store: &CorpusStore,
    window_days: u32,
) -> Result<CoverageStats> {
    let mut article_dates: HashMap<&str, BTreeSet<(NaiveDate, &str)>> = HashMap::new();
    for (article_id, policy_id) in links {
        let article = store.article(article_id).ok_or_else(|| Error::UnknownId {
            kind: "article",
            id: article_id.to_string(),
        })?;
        if store.policy(policy_id).is_none() {
            return Err(Error::UnknownId {
                kind: "policy",
                id: policy_id.to_string(),
            });
        }
        article_dates
            .entry(policy_id)
            .or_default()
            .insert((article.publish_date, article_id));
    }

    let mut rows: Vec<CoverageRow> = store
        .meetings()
        .iter()
        .map(|m| {
            let proposed: BTreeSet<&str> = m.policy_ids().collect();
            let n_covered = proposed
                .iter()
                .filter(|p| {
                    article_dates.get(*p).is_some_and(|dates| {
                        dates.iter().any(|(d, _)| {
                            let gap = (*d - m.date).num_days();
                            (0..=i64::from(window_days)).contains(&gap)
                        })
                    })
                })
                .count();
            let n_proposed = proposed.len();
            CoverageRow {
                meeting_id: m.id.clone(),
                date: m.date,
                n_proposed,
                n_covered,
                fraction: if n_proposed == 0 { 0.0 } else { n_covered as f64 / n_proposed as f64 },
            }
        })
        .collect();
    rows.sort_by(|a, b| (a.date, &a.meeting_id).cmp(&(b.date, &b.meeting_id)));

    let per_policy: BTreeMap<&str, usize> = store
        .policies()
        .iter()
        .map(|p| (p.id.as_str(), article_dates.get(p.id.as_str()).map_or(0, |s| s.len())))
        .collect();
    let articles: Vec<usize> = per_policy.values().copied().collect();
    let meetings: Vec<usize> = store.policies().iter().map(|p| p.meeting_ids.len()).collect();

    Ok(CoverageStats {
        window_days,
        series: CoverageSeries { rows },
        articles_per_policy: CountHistogram::from_values(&articles),
        meetings_per_policy: CountHistogram::from_values(&meetings),
        n_policies: store.policies().len(),
        n_linked_policies: articles.iter().filter(|&&n| n > 0).count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{AgendaItem, Article, Meeting, PolicyItem};

    fn d(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    fn store(n_policies: usize) -> CorpusStore {
        let policies: Vec<PolicyItem> = (0..n_policies)
            .map(|i| PolicyItem {
                id: format!("P{i:02}"),
                title: format!("policy {i}"),
                description: String::new(),
                introduced_date: d("2020-01-01"),
                meeting_ids: vec!["M1".into()],
            })
            .collect();
        let meeting = Meeting {
            id: "M1".into(),
            date: d("2020-01-07"),
            agenda: policies.iter().map(|p| AgendaItem::policy("NEW BUSINESS", &p.id, None)).collect(),
            segments: Vec::new(),
            minutes_text: None,
        };
        let articles = vec![
            Article::new("A1", "u1", d("2020-01-08"), "t", "b one"),
            Article::new("A2", "u2", d("2020-03-08"), "t", "b two"),
        ];
        CorpusStore::new(articles, policies, vec![meeting]).unwrap()
    }

    #[test]
    fn fifty_proposed_two_covered() {
        let s = store(50);
        let stats = coverage_stats([("A1", "P00"), ("A1", "P01"), ("A2", "P02")], &s, 31).unwrap();
        let row = &stats.series.rows[0];
        assert_eq!((row.n_proposed, row.n_covered), (50, 2));
        assert!((row.fraction - 0.04).abs() < 1e-12);
    }

    #[test]
    fn unlinked_policies_land_in_bucket_zero() {
        let s = store(5);
        let stats = coverage_stats([("A1", "P00"), ("A2", "P00")], &s, 31).unwrap();
        assert_eq!(stats.articles_per_policy.count(0), 4);
        assert_eq!(stats.articles_per_policy.count(2), 1);
        assert_eq!(stats.articles_per_policy.total(), 5);
        assert_eq!(stats.meetings_per_policy.median, 1.0);
    }

    #[test]
    fn unknown_ids_are_errors() {
        let s = store(2);
        assert!(coverage_stats([("A9", "P00")], &s, 31).is_err());
        assert!(coverage_stats([("A1", "P99")], &s, 31).is_err());
    }

    #[test]
    fn empty_histogram() {
        let h = CountHistogram::from_values(&[]);
        assert!(h.buckets.is_empty());
        assert_eq!(h.mean, 0.0);
    }
}
