use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::sections::{section_spans, PUBLIC_COMMENT};
use crate::corpus::{Meeting, PolicyItem};
use crate::error::{Error, Result};
use crate::textvec::{cosine, TfIdfModel, TokenizerConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeakerProfile {
    pub speaker_id: String,
    pub segments: Vec<usize>,
    pub total_seconds: f64,
    pub public_commenter: bool,
}

/// Every speaker of the meeting, sorted by id, flagged when all of their
/// segments fall inside a public comment span.
pub fn speaker_profiles(meeting: &Meeting) -> Vec<SpeakerProfile> {
    let spans: Vec<_> = section_spans(meeting)
        .into_iter()
        .filter(|s| s.section_header == PUBLIC_COMMENT)
        .collect();
    let mut by_speaker: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, s) in meeting.segments.iter().enumerate() {
        by_speaker.entry(s.speaker_id.as_str()).or_default().push(i);
    }
    by_speaker
        .into_iter()
        .map(|(id, segs)| {
            let inside = segs.iter().all(|&i| {
                let s = &meeting.segments[i];
                spans.iter().any(|span| span.contains_interval(s.t_start, s.t_end))
            });
            SpeakerProfile {
                speaker_id: id.to_string(),
                total_seconds: segs.iter().map(|&i| meeting.segments[i].duration()).sum(),
                public_commenter: inside && !spans.is_empty(),
                segments: segs,
            }
        })
        .collect()
}

pub fn find_public_commenters(meeting: &Meeting) -> Vec<SpeakerProfile> {
    if !meeting.agenda.iter().any(|a| a.is_header() && a.section_header == PUBLIC_COMMENT) {
        log::warn!("meeting {} has no {PUBLIC_COMMENT} section", meeting.id);
        return Vec::new();
    }
    speaker_profiles(meeting).into_iter().filter(|p| p.public_commenter).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommentAssignment {
    pub meeting_id: String,
    pub speaker_id: String,
    pub policy_id: String,
    pub overlap: f64,
    pub minutes: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CommentConfig {
    pub min_overlap: f64,
    /// Assign every policy above the threshold instead of only the best.
    pub multi_assign: bool,
}

impl Default for CommentConfig {
    fn default() -> Self {
        Self {
            min_overlap: 0.15,
            multi_assign: false,
        }
    }
}

/// TF-IDF space (stopwords removed) over policy texts and all segments,
/// shared by every meeting's comment matching.
pub fn comment_space(meetings: &[Meeting], policies: &[PolicyItem]) -> Result<TfIdfModel> {
    let docs: Vec<String> = policies
        .iter()
        .map(PolicyItem::text)
        .chain(meetings.iter().flat_map(|m| m.segments.iter().map(|s| s.text.clone())))
        .collect();
    TfIdfModel::fit(&docs, TokenizerConfig::default().with_stopwords_removed())
}

/// Matches each commenter's concatenated speech against the meeting's
/// policies; the best match at or above the threshold wins, ties going to
/// the lower policy id.
pub fn assign_comments(
    meeting: &Meeting,
    commenters: &[SpeakerProfile],
    policies: &[&PolicyItem],
    space: &TfIdfModel,
    config: CommentConfig,
) -> Vec<CommentAssignment> {
    let mut sorted: Vec<&PolicyItem> = policies.to_vec();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));
    let targets: Vec<_> = sorted.iter().map(|p| space.transform(&p.text())).collect();
    let mut out = Vec::new();
    for c in commenters {
        let speech: Vec<&str> = c.segments.iter().map(|&i| meeting.segments[i].text.as_str()).collect();
        let v = space.transform(&speech.join(" "));
        let sims: Vec<f64> = targets.iter().map(|t| cosine(&v, t)).collect();
        let mut picked: Vec<usize> = if config.multi_assign {
            (0..sims.len()).filter(|&i| sims[i] >= config.min_overlap).collect()
        } else {
            let best = (0..sims.len()).fold(None, |best: Option<usize>, i| match best {
                Some(b) if sims[b] >= sims[i] => Some(b),
                _ => Some(i),
            });
            best.filter(|&b| sims[b] >= config.min_overlap).into_iter().collect()
        };
        picked.sort_unstable();
        for i in picked {
            out.push(CommentAssignment {
                meeting_id: meeting.id.clone(),
                speaker_id: c.speaker_id.clone(),
                policy_id: sorted[i].id.clone(),
                overlap: sims[i],
                minutes: c.total_seconds / 60.0,
            });
        }
    }
    out
}

pub fn write_assignments_csv(rows: &[CommentAssignment], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["meeting_id", "speaker_id", "policy_id", "overlap", "minutes"])?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
