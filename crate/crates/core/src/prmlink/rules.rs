use std::sync::LazyLock;

use chrono::NaiveDate;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::corpus::Article;

static ISO_DATE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\b(\d{4})-(\d{2})-(\d{2})\b").unwrap());
static LONG_DATE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"\b(January|February|March|April|May|June|July|August|September|October|November|December)\s+(\d{1,2}),\s*(\d{4})\b",
    )
    .unwrap()
});

const MONTHS: [&str; 12] = [
    "January", "February", "March", "April", "May", "June", "July", "August", "September", "October", "November",
    "December",
];

/// Every calendar date mentioned as `YYYY-MM-DD` or `Month D, YYYY`.
pub fn date_mentions(text: &str) -> Vec<NaiveDate> {
    let iso = ISO_DATE.captures_iter(text).filter_map(|c| {
        NaiveDate::from_ymd_opt(c[1].parse().ok()?, c[2].parse().ok()?, c[3].parse().ok()?)
    });
    let long = LONG_DATE.captures_iter(text).filter_map(|c| {
        let month = MONTHS.iter().position(|m| *m == &c[1])? as u32 + 1;
        NaiveDate::from_ymd_opt(c[3].parse().ok()?, month, c[2].parse().ok()?)
    });
    let mut out: Vec<NaiveDate> = iso.chain(long).collect();
    out.sort();
    out.dedup();
    out
}

/// Offline stand-in for the recent-local-vote question: a date mention at
/// most `window_days` before publication plus the governing body's name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RecentVoteRule {
    pub body_name: String,
    pub window_days: i64,
    pub hit: f64,
    pub miss: f64,
}

impl Default for RecentVoteRule {
    fn default() -> Self {
        Self {
            body_name: crate::corpus::synth::DEFAULT_BODY_NAME.to_string(),
            window_days: 31,
            hit: 0.9,
            miss: 0.1,
        }
    }
}

impl RecentVoteRule {
    pub fn matches(&self, article: &Article) -> bool {
        let text = article.text();
        if !text.to_lowercase().contains(&self.body_name.to_lowercase()) {
            return false;
        }
        date_mentions(&text).into_iter().any(|d| {
            let gap = (article.publish_date - d).num_days();
            (0..=self.window_days).contains(&gap)
        })
    }

    pub fn probability(&self, article: &Article) -> f64 {
        if self.matches(article) {
            self.hit
        } else {
            self.miss
        }
    }
}
