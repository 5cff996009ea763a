use std::collections::{BTreeMap, HashMap};

use chrono::{Duration, NaiveDate};

use super::schema::{Article, CandidatePair, PolicyItem};
use crate::error::{Error, Result};

/// "Within a month", read as a calendar-agnostic 31-day window.
pub const DEFAULT_WINDOW_DAYS: u32 = 31;

/// Every (article, policy) pair where some meeting discussing the policy
/// fell in `[publish_date - window_days, publish_date]`. `days_gap` is
/// measured to the latest such meeting. Sorted by `(article_id, policy_id)`.
pub fn candidate_pairs(
    articles: &[Article],
    policies: &[PolicyItem],
    meeting_dates: &HashMap<String, NaiveDate>,
    window_days: u32,
) -> Result<Vec<CandidatePair>> {
    if window_days < 1 {
        return Err(Error::OutOfRange {
            what: "window_days",
            value: window_days.to_string(),
            range: ">= 1".into(),
        });
    }
    let mut by_date: BTreeMap<NaiveDate, Vec<usize>> = BTreeMap::new();
    for (pi, p) in policies.iter().enumerate() {
        for mid in &p.meeting_ids {
            if let Some(&d) = meeting_dates.get(mid) {
                by_date.entry(d).or_default().push(pi);
            }
        }
    }
    let mut out = Vec::new();
    for a in articles {
        let lo = a.publish_date - Duration::days(window_days as i64);
        let mut latest: HashMap<usize, NaiveDate> = HashMap::new();
        for (&d, ps) in by_date.range(lo..=a.publish_date) {
            for &pi in ps {
                latest.insert(pi, d);
            }
        }
        out.extend(latest.into_iter().map(|(pi, d)| CandidatePair {
            article_id: a.id.clone(),
            policy_id: policies[pi].id.clone(),
            days_gap: (a.publish_date - d).num_days(),
        }));
    }
    out.sort_by(|x, y| (&x.article_id, &x.policy_id).cmp(&(&y.article_id, &y.policy_id)));
    Ok(out)
}
