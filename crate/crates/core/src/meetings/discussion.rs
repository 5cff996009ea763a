use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::corpus::Meeting;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscussionStats {
    pub words: usize,
    pub minutes: f64,
    pub speakers: usize,
}

/// Segment-start interval `[start, end)` of an agenda item: from its
/// timestamp to the next strictly later item timestamp, else the meeting end.
pub fn item_span(meeting: &Meeting, position: usize) -> Option<(f64, f64)> {
    let start = meeting.agenda.get(position)?.timestamp_s?;
    let end = meeting.agenda[position + 1..]
        .iter()
        .filter_map(|a| a.timestamp_s)
        .find(|&t| t > start)
        .unwrap_or_else(|| meeting.duration())
        .max(start);
    Some((start, end))
}

/// Words, minutes and distinct speakers over the policy's item span. A
/// zero-length span counts the segments that start exactly at it.
pub fn policy_discussion_stats(meeting: &Meeting, policy_id: &str) -> Result<DiscussionStats> {
    let not_on_agenda = || Error::NotOnAgenda {
        policy: policy_id.to_string(),
        meeting: meeting.id.clone(),
    };
    let pos = meeting.agenda_position(policy_id).ok_or_else(not_on_agenda)?;
    let (start, end) = item_span(meeting, pos).ok_or_else(|| {
        Error::invalid(format!("meeting {}: item {policy_id} has no timestamp; peg the agenda first", meeting.id))
    })?;
    let inside = |t: f64| if start == end { t == start } else { t >= start && t < end };
    let segs: Vec<_> = meeting.segments.iter().filter(|s| inside(s.t_start)).collect();
    let speakers: BTreeSet<&str> = segs.iter().map(|s| s.speaker_id.as_str()).collect();
    Ok(DiscussionStats {
        words: segs.iter().map(|s| s.word_count()).sum(),
        minutes: (end - start) / 60.0,
        speakers: speakers.len(),
    })
}
