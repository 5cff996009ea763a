use std::collections::{BTreeMap, HashMap, HashSet};

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{CorpusStore, Meeting, PolicyItem};
use crate::error::{Error, Result};
use crate::meetings::{item_span, policy_discussion_stats, CommentAssignment};

/// One policy presented at one meeting, with its coverage label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewsworthyExample {
    pub policy_id: String,
    pub meeting_id: String,
    pub meeting_date: NaiveDate,
    pub label: bool,
    pub policy_text: String,
    pub n_prior_meetings: usize,
    pub n_prior_articles: usize,
    pub discussion_minutes: f64,
    pub n_words: usize,
    pub discussion_text: String,
    pub n_speakers: usize,
    pub n_public_commenters: usize,
    pub public_comment_minutes: f64,
    pub public_comment_text: String,
}

/// A policy is newsworthy iff at least one link references it.
pub fn make_labels<'a>(policies: &[PolicyItem], linked_policy_ids: impl IntoIterator<Item = &'a str>) -> BTreeMap<String, bool> {
    let linked: HashSet<&str> = linked_policy_ids.into_iter().collect();
    policies
        .iter()
        .map(|p| (p.id.clone(), linked.contains(p.id.as_str())))
        .collect()
}

/// Publication dates of linked articles, per policy.
#[derive(Debug, Clone, Default)]
pub struct LinkIndex {
    dates: HashMap<String, Vec<NaiveDate>>,
}

impl LinkIndex {
    /// Pairs whose article is unknown to the store are ignored.
    pub fn new<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>, store: &CorpusStore) -> Self {
        let mut dates: HashMap<String, Vec<NaiveDate>> = HashMap::new();
        let mut seen = HashSet::new();
        for (a, p) in pairs {
            if !seen.insert((a, p)) {
                continue;
            }
            if let Some(article) = store.article(a) {
                dates.entry(p.to_string()).or_default().push(article.publish_date);
            }
        }
        Self { dates }
    }

    pub fn is_linked(&self, policy_id: &str) -> bool {
        self.dates.contains_key(policy_id)
    }

    pub fn articles_before(&self, policy_id: &str, date: NaiveDate) -> usize {
        self.dates.get(policy_id).map_or(0, |d| d.iter().filter(|&&x| x < date).count())
    }
}

fn lead_text(meeting: &Meeting, speaker: &str) -> String {
    let words: Vec<&str> = meeting
        .segments
        .iter()
        .filter(|s| s.speaker_id == speaker)
        .flat_map(|s| s.text.split_whitespace())
        .collect();
    words.join(" ")
}

/// Features for a policy at a pegged meeting. Prior counts only look at
/// meetings and articles dated strictly before this meeting.
pub fn extract_features(
    policy: &PolicyItem,
    meeting: &Meeting,
    store: &CorpusStore,
    links: &LinkIndex,
    assignments: &[CommentAssignment],
) -> Result<NewsworthyExample> {
    let pos = meeting.agenda_position(&policy.id).ok_or_else(|| Error::NotOnAgenda {
        policy: policy.id.clone(),
        meeting: meeting.id.clone(),
    })?;
    let stats = policy_discussion_stats(meeting, &policy.id)?;
    let (start, end) = item_span(meeting, pos).expect("stats succeeded so the item is timestamped");
    let discussion: Vec<&str> = meeting
        .segments
        .iter()
        .filter(|s| if start == end { s.t_start == start } else { s.t_start >= start && s.t_start < end })
        .map(|s| s.text.as_str())
        .collect();

    let n_prior_meetings = policy
        .meeting_ids
        .iter()
        .filter_map(|m| store.meeting(m))
        .filter(|m| m.date < meeting.date)
        .count();

    let mut comments: Vec<&CommentAssignment> = assignments
        .iter()
        .filter(|a| a.meeting_id == meeting.id && a.policy_id == policy.id)
        .collect();
    comments.sort_by(|a, b| a.speaker_id.cmp(&b.speaker_id));
    let public_comment_text = comments
        .iter()
        .enumerate()
        .map(|(k, c)| {
            format!(
                "<SPEAKER {}> spoke for {:.0} minutes and said: \"{}\"",
                k + 1,
                c.minutes,
                lead_text(meeting, &c.speaker_id)
            )
        })
        .collect::<Vec<_>>()
        .join(" ");

    Ok(NewsworthyExample {
        policy_id: policy.id.clone(),
        meeting_id: meeting.id.clone(),
        meeting_date: meeting.date,
        label: links.is_linked(&policy.id),
        policy_text: policy.text(),
        n_prior_meetings,
        n_prior_articles: links.articles_before(&policy.id, meeting.date),
        discussion_minutes: stats.minutes,
        n_words: stats.words,
        discussion_text: discussion.join(" "),
        n_speakers: stats.speakers,
        n_public_commenters: comments.len(),
        public_comment_minutes: comments.iter().map(|c| c.minutes).sum(),
        public_comment_text,
    })
}

/// Examples for every known policy on every pegged meeting, ordered by
/// meeting date, meeting id and agenda position.
pub fn build_dataset(
    meetings: &[Meeting],
    store: &CorpusStore,
    links: &LinkIndex,
    assignments: &[CommentAssignment],
) -> Result<Vec<NewsworthyExample>> {
    let mut jobs: Vec<(&Meeting, &PolicyItem)> = Vec::new();
    let mut order: Vec<&Meeting> = meetings.iter().collect();
    order.sort_by(|a, b| (a.date, &a.id).cmp(&(b.date, &b.id)));
    for m in order {
        let mut seen = HashSet::new();
        for id in m.policy_ids() {
            if !seen.insert(id) {
                continue;
            }
            if let Some(p) = store.policy(id) {
                jobs.push((m, p));
            }
        }
    }
    jobs.par_iter()
        .map(|(m, p)| extract_features(p, m, store, links, assignments))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{AgendaItem, Article, TranscriptSegment};

    fn d(day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2020, 1, day).unwrap()
    }

    fn meeting(id: &str, day: u32, policies: &[&str]) -> Meeting {
        let mut agenda = vec![AgendaItem::header("REGULAR AGENDA", Some(0.0))];
        let mut segments = vec![TranscriptSegment::new("chair", 0.0, 5.0, "call the items")];
        for (k, p) in policies.iter().enumerate() {
            let t = 10.0 + 60.0 * k as f64;
            agenda.push(AgendaItem::policy("REGULAR AGENDA", *p, Some(t)));
            segments.push(TranscriptSegment::new("chair", t, t + 5.0, "next item"));
            segments.push(TranscriptSegment::new("sup", t + 6.0, t + 50.0, "we support this"));
        }
        agenda.push(AgendaItem::header("PUBLIC COMMENT", Some(500.0)));
        segments.push(TranscriptSegment::new("pub", 510.0, 570.0, "hello i oppose it"));
        Meeting {
            id: id.into(),
            date: d(day),
            agenda,
            segments,
            minutes_text: None,
        }
    }

    fn store() -> CorpusStore {
        let policy = |id: &str, ms: &[&str]| PolicyItem {
            id: id.into(),
            title: format!("title {id}"),
            description: "desc".into(),
            introduced_date: d(1),
            meeting_ids: ms.iter().map(|s| s.to_string()).collect(),
        };
        let arts = vec![
            Article::new("a1", "u1", d(5), "t", "b1"),
            Article::new("a2", "u2", d(20), "t", "b2"),
        ];
        CorpusStore::new(
            arts,
            vec![policy("p1", &["m1", "m2", "m3"]), policy("p2", &["m3"])],
            vec![meeting("m1", 2, &["p1"]), meeting("m2", 9, &["p1"]), meeting("m3", 16, &["p1", "p2"])],
        )
        .unwrap()
    }

    #[test]
    fn labels_follow_links() {
        let s = store();
        let labels = make_labels(s.policies(), ["p1", "p1", "p1"]);
        assert_eq!(labels["p1"], true);
        assert_eq!(labels["p2"], false);
    }

    #[test]
    fn first_presentation_has_no_history() {
        let s = store();
        let links = LinkIndex::new([("a1", "p1")], &s);
        let ex = extract_features(s.policy("p1").unwrap(), s.meeting("m1").unwrap(), &s, &links, &[]).unwrap();
        assert_eq!((ex.n_prior_meetings, ex.n_prior_articles), (0, 0));
        assert!(ex.label);
        assert_eq!(ex.n_public_commenters, 0);
        assert!(ex.public_comment_text.is_empty());
    }

    #[test]
    fn prior_counts_are_strict() {
        let s = store();
        let links = LinkIndex::new([("a1", "p1"), ("a2", "p1")], &s);
        let ex = extract_features(s.policy("p1").unwrap(), s.meeting("m3").unwrap(), &s, &links, &[]).unwrap();
        assert_eq!((ex.n_prior_meetings, ex.n_prior_articles), (2, 1));
        assert_eq!(ex.n_words, 5);
        assert_eq!(ex.n_speakers, 2);
    }

    #[test]
    fn comments_fill_public_fields() {
        let s = store();
        let m = s.meeting("m3").unwrap();
        let a = CommentAssignment {
            meeting_id: "m3".into(),
            speaker_id: "pub".into(),
            policy_id: "p2".into(),
            overlap: 0.4,
            minutes: 1.0,
        };
        let ex = extract_features(s.policy("p2").unwrap(), m, &s, &LinkIndex::default(), &[a]).unwrap();
        assert_eq!(ex.n_public_commenters, 1);
        assert_eq!(ex.public_comment_text, "<SPEAKER 1> spoke for 1 minutes and said: \"hello i oppose it\"");
    }

    #[test]
    fn off_agenda_policy_errors() {
        let s = store();
        let r = extract_features(s.policy("p2").unwrap(), s.meeting("m1").unwrap(), &s, &LinkIndex::default(), &[]);
        assert!(matches!(r, Err(Error::NotOnAgenda { .. })));
    }

    #[test]
    fn dataset_order_and_size() {
        let s = store();
        let ds = build_dataset(s.meetings(), &s, &LinkIndex::default(), &[]).unwrap();
        let keys: Vec<_> = ds.iter().map(|e| (e.meeting_id.as_str(), e.policy_id.as_str())).collect();
        assert_eq!(keys, vec![("m1", "p1"), ("m2", "p1"), ("m3", "p1"), ("m3", "p2")]);
    }
}
