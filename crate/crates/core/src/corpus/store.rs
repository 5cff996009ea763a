use std::collections::HashMap;

use chrono::NaiveDate;

use super::schema::{Article, Meeting, PolicyItem};
use crate::error::{Error, Result};

/// Immutable in-memory corpus with id lookups. Safe to share across threads.
#[derive(Debug, Clone, Default)]
pub struct CorpusStore {
    articles: Vec<Article>,
    policies: Vec<PolicyItem>,
    meetings: Vec<Meeting>,
    article_idx: HashMap<String, usize>,
    policy_idx: HashMap<String, usize>,
    meeting_idx: HashMap<String, usize>,
    /// Agenda references to policies missing from the corpus.
    pub dangling_agenda_refs: usize,
}

impl CorpusStore {
    /// Builds the store; each policy's `meeting_ids` is re-sorted by meeting
    /// date (ids with no known meeting go last, in their original order).
    pub fn new(articles: Vec<Article>, mut policies: Vec<PolicyItem>, meetings: Vec<Meeting>) -> Result<Self> {
        let article_idx = index_of(&articles, |a| &a.id, "article")?;
        let meeting_idx = index_of(&meetings, |m| &m.id, "meeting")?;
        for p in &mut policies {
            p.meeting_ids.sort_by_key(|id| {
                meeting_idx
                    .get(id)
                    .map(|&i| (0, meetings[i].date))
                    .unwrap_or((1, NaiveDate::MAX))
            });
        }
        let policy_idx = index_of(&policies, |p| &p.id, "policy")?;
        let dangling_agenda_refs = meetings
            .iter()
            .flat_map(|m| m.policy_ids())
            .filter(|id| !policy_idx.contains_key(*id))
            .count();
        if dangling_agenda_refs > 0 {
            log::warn!("{dangling_agenda_refs} agenda items reference unknown policies");
        }
        Ok(Self {
            articles,
            policies,
            meetings,
            article_idx,
            policy_idx,
            meeting_idx,
            dangling_agenda_refs,
        })
    }

    pub fn articles(&self) -> &[Article] {
        &self.articles
    }

    pub fn policies(&self) -> &[PolicyItem] {
        &self.policies
    }

    pub fn meetings(&self) -> &[Meeting] {
        &self.meetings
    }

    pub fn article(&self, id: &str) -> Option<&Article> {
        self.article_idx.get(id).map(|&i| &self.articles[i])
    }

    pub fn policy(&self, id: &str) -> Option<&PolicyItem> {
        self.policy_idx.get(id).map(|&i| &self.policies[i])
    }

    pub fn meeting(&self, id: &str) -> Option<&Meeting> {
        self.meeting_idx.get(id).map(|&i| &self.meetings[i])
    }

    pub fn meeting_dates(&self) -> HashMap<String, NaiveDate> {
        self.meetings.iter().map(|m| (m.id.clone(), m.date)).collect()
    }

    /// Dates of the meetings where `policy` was discussed, ascending.
    pub fn discussion_dates(&self, policy: &PolicyItem) -> Vec<NaiveDate> {
        policy
            .meeting_ids
            .iter()
            .filter_map(|id| self.meeting(id).map(|m| m.date))
            .collect()
    }
}

fn index_of<T>(items: &[T], key: impl Fn(&T) -> &String, kind: &'static str) -> Result<HashMap<String, usize>> {
    let mut map = HashMap::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        if map.insert(key(item).clone(), i).is_some() {
            return Err(Error::invalid(format!("duplicate {kind} id {}", key(item))));
        }
    }
    Ok(map)
}
