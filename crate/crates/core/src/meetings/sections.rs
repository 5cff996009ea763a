use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Meeting;
use crate::error::{Error, Result};
use crate::util::{mean, std_dev};

pub const PUBLIC_COMMENT: &str = "PUBLIC COMMENT";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionSpan {
    pub section_header: String,
    pub t_start: f64,
    pub t_end: f64,
}

impl SectionSpan {
    pub fn seconds(&self) -> f64 {
        self.t_end - self.t_start
    }

    pub fn contains_interval(&self, start: f64, end: f64) -> bool {
        self.t_start <= start && end <= self.t_end
    }
}

/// Spans from each timestamped header to the next header or the meeting
/// end, in agenda order.
pub fn section_spans(meeting: &Meeting) -> Vec<SectionSpan> {
    let headers: Vec<(&str, f64)> = meeting
        .agenda
        .iter()
        .filter(|a| a.is_header())
        .filter_map(|a| Some((a.section_header.as_str(), a.timestamp_s?)))
        .collect();
    let end = meeting.duration();
    headers
        .iter()
        .enumerate()
        .map(|(k, &(h, t))| SectionSpan {
            section_header: h.to_string(),
            t_start: t,
            t_end: headers.get(k + 1).map_or(end, |n| n.1).max(t),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionStats {
    pub meeting_id: String,
    pub section_header: String,
    pub minutes: f64,
    pub n_policies: usize,
    pub n_speakers: usize,
}

pub fn section_stats(meeting: &Meeting) -> Vec<SectionStats> {
    section_spans(meeting)
        .into_iter()
        .map(|span| {
            let n_policies = meeting
                .agenda
                .iter()
                .filter(|a| a.policy_id.is_some() && a.section_header == span.section_header)
                .count();
            let speakers: BTreeSet<&str> = meeting
                .segments
                .iter()
                .filter(|s| s.t_start >= span.t_start && s.t_start < span.t_end)
                .map(|s| s.speaker_id.as_str())
                .collect();
            SectionStats {
                meeting_id: meeting.id.clone(),
                minutes: span.seconds() / 60.0,
                n_policies,
                n_speakers: speakers.len(),
                section_header: span.section_header,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionRollupRow {
    pub section_header: String,
    pub n_meetings: usize,
    pub mean_minutes: f64,
    pub sd_minutes: f64,
    pub mean_policies: f64,
    pub sd_policies: f64,
    pub mean_speakers: f64,
    pub sd_speakers: f64,
}

/// Per-section means and population standard deviations across meetings,
/// in order of first appearance.
pub fn section_rollup(meetings: &[Meeting]) -> Vec<SectionRollupRow> {
    let mut order: Vec<String> = Vec::new();
    let mut groups: HashMap<String, Vec<SectionStats>> = HashMap::new();
    for m in meetings {
        for s in section_stats(m) {
            if !groups.contains_key(&s.section_header) {
                order.push(s.section_header.clone());
            }
            groups.entry(s.section_header.clone()).or_default().push(s);
        }
    }
    order
        .into_iter()
        .map(|h| {
            let rows = &groups[&h];
            let minutes: Vec<f64> = rows.iter().map(|r| r.minutes).collect();
            let policies: Vec<f64> = rows.iter().map(|r| r.n_policies as f64).collect();
            let speakers: Vec<f64> = rows.iter().map(|r| r.n_speakers as f64).collect();
            SectionRollupRow {
                section_header: h,
                n_meetings: rows.len(),
                mean_minutes: mean(&minutes),
                sd_minutes: std_dev(&minutes),
                mean_policies: mean(&policies),
                sd_policies: std_dev(&policies),
                mean_speakers: mean(&speakers),
                sd_speakers: std_dev(&speakers),
            }
        })
        .collect()
}

pub fn write_rollup_csv(rows: &[SectionRollupRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{AgendaItem, TranscriptSegment};
    use chrono::NaiveDate;

    fn meeting() -> Meeting {
        Meeting {
            id: "m".into(),
            date: NaiveDate::from_ymd_opt(2020, 1, 1).unwrap(),
            agenda: vec![
                AgendaItem::header("A", Some(0.0)),
                AgendaItem::policy("A", "p1", Some(60.0)),
                AgendaItem::header("B", Some(600.0)),
            ],
            segments: vec![
                TranscriptSegment::new("s1", 0.0, 50.0, "x"),
                TranscriptSegment::new("s2", 60.0, 500.0, "x"),
                TranscriptSegment::new("s1", 600.0, 900.0, "x"),
            ],
            minutes_text: None,
        }
    }

    #[test]
    fn two_sections_exact_durations() {
        let stats = section_stats(&meeting());
        assert_eq!(stats.len(), 2);
        assert_eq!((stats[0].minutes, stats[0].n_policies, stats[0].n_speakers), (10.0, 1, 2));
        assert_eq!((stats[1].minutes, stats[1].n_policies, stats[1].n_speakers), (5.0, 0, 1));
    }

    #[test]
    fn spans_partition_from_first_header() {
        let spans = section_spans(&meeting());
        assert_eq!(spans[0].t_end, spans[1].t_start);
        assert_eq!(spans.last().unwrap().t_end, 900.0);
    }

    #[test]
    fn rollup_single_meeting_has_zero_spread() {
        let rows = section_rollup(&[meeting()]);
        assert_eq!(rows[0].section_header, "A");
        assert_eq!((rows[0].mean_minutes, rows[0].sd_minutes), (10.0, 0.0));
    }
}
