use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::util::hash64;

/// Lowercase, strip punctuation, collapse whitespace. Used for dedup hashing.
pub fn normalize_body(text: &str) -> String {
    let lowered: String = text
        .to_lowercase()
        .chars()
        .filter(|c| c.is_alphanumeric() || c.is_whitespace())
        .collect();
    lowered.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawArticle")]
pub struct Article {
    pub id: String,
    pub url: String,
    pub publish_date: NaiveDate,
    pub title: String,
    pub body: String,
    #[serde(skip_serializing)]
    pub dedup_hash: u64,
}

#[derive(Deserialize)]
struct RawArticle {
    id: String,
    url: String,
    publish_date: NaiveDate,
    title: String,
    body: String,
}

impl From<RawArticle> for Article {
    fn from(r: RawArticle) -> Self {
        Article::new(r.id, r.url, r.publish_date, r.title, r.body)
    }
}

impl Article {
    pub fn new(
        id: impl Into<String>,
        url: impl Into<String>,
        publish_date: NaiveDate,
        title: impl Into<String>,
        body: impl Into<String>,
    ) -> Self {
        let body = body.into();
        let dedup_hash = hash64(normalize_body(&body).as_bytes());
        Self {
            id: id.into(),
            url: url.into(),
            publish_date,
            title: title.into(),
            body,
            dedup_hash,
        }
    }

    /// Title and body joined; what classifiers and similarity see.
    pub fn text(&self) -> String {
        format!("{}\n{}", self.title, self.body)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyItem {
    pub id: String,
    pub title: String,
    pub description: String,
    pub introduced_date: NaiveDate,
    #[serde(default)]
    pub meeting_ids: Vec<String>,
}

impl PolicyItem {
    pub fn text(&self) -> String {
        format!("{}. {}", self.title, self.description)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgendaItem {
    pub section_header: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp_s: Option<f64>,
    /// Timestamp was inferred rather than read from the source agenda.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub pegged: bool,
}

impl AgendaItem {
    pub fn header(section: impl Into<String>, timestamp_s: Option<f64>) -> Self {
        Self {
            section_header: section.into(),
            policy_id: None,
            timestamp_s,
            pegged: false,
        }
    }

    pub fn policy(section: impl Into<String>, policy_id: impl Into<String>, timestamp_s: Option<f64>) -> Self {
        Self {
            section_header: section.into(),
            policy_id: Some(policy_id.into()),
            timestamp_s,
            pegged: false,
        }
    }

    pub fn is_header(&self) -> bool {
        self.policy_id.is_none()
    }

    /// Timestamp read from the source agenda (not inferred).
    pub fn source_timestamp(&self) -> Option<f64> {
        if self.pegged {
            None
        } else {
            self.timestamp_s
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptSegment {
    pub speaker_id: String,
    pub t_start: f64,
    pub t_end: f64,
    pub text: String,
}

impl TranscriptSegment {
    pub fn new(speaker_id: impl Into<String>, t_start: f64, t_end: f64, text: impl Into<String>) -> Self {
        Self {
            speaker_id: speaker_id.into(),
            t_start,
            t_end,
            text: text.into(),
        }
    }

    pub fn duration(&self) -> f64 {
        self.t_end - self.t_start
    }

    pub fn word_count(&self) -> usize {
        self.text.split_whitespace().count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meeting {
    pub id: String,
    pub date: NaiveDate,
    #[serde(default)]
    pub agenda: Vec<AgendaItem>,
    #[serde(default)]
    pub segments: Vec<TranscriptSegment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minutes_text: Option<String>,
}

impl Meeting {
    /// End of the last transcript segment, or zero without a transcript.
    pub fn duration(&self) -> f64 {
        self.segments.iter().map(|s| s.t_end).fold(0.0, f64::max)
    }

    pub fn policy_ids(&self) -> impl Iterator<Item = &str> {
        self.agenda.iter().filter_map(|a| a.policy_id.as_deref())
    }

    pub fn agenda_position(&self, policy_id: &str) -> Option<usize> {
        self.agenda.iter().position(|a| a.policy_id.as_deref() == Some(policy_id))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GoldPair {
    pub article_id: String,
    pub policy_id: String,
    pub split: Split,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CandidatePair {
    pub article_id: String,
    pub policy_id: String,
    /// Publication date minus the latest in-window discussion date.
    pub days_gap: i64,
}

/// Human labels for the per-article link attributes. Any field may be absent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub article_id: String,
    /// Covers the governing board.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub covers_body: Option<bool>,
    /// Covers votes or policy.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub covers_votes: Option<bool>,
    /// Covers a recent vote of the right body.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recent_local_vote: Option<bool>,
}
