use chrono::{Duration, NaiveDate};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::features::NewsworthyExample;
use crate::corpus::synth::text::{pick, picks};
use crate::corpus::synth::vocab::{COMMENT_OFFTOPIC, DELIBERATION, GENERIC_NEWS, POLICY_BOILERPLATE, TOPICS};
use crate::error::{Error, Result};
use crate::util::rng;

/// A newsworthiness dataset whose only label signal is a marker token in
/// the policy text, at the same rate in every year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NewsworthySynthParams {
    pub start_year: i32,
    pub end_year: i32,
    pub meetings_per_year: usize,
    pub policies_per_meeting: usize,
    pub positive_rate: f64,
    pub signal_token: String,
    pub signal_rate_positive: f64,
    pub signal_rate_negative: f64,
}

impl Default for NewsworthySynthParams {
    fn default() -> Self {
        Self {
            start_year: 2013,
            end_year: 2023,
            meetings_per_year: 40,
            policies_per_meeting: 12,
            positive_rate: 0.1,
            signal_token: "quivelmarn".to_string(),
            signal_rate_positive: 0.9,
            signal_rate_negative: 0.05,
        }
    }
}

pub fn generate_newsworthy_dataset(seed: u64, params: &NewsworthySynthParams) -> Result<Vec<NewsworthyExample>> {
    if params.end_year < params.start_year || params.meetings_per_year == 0 || params.policies_per_meeting == 0 {
        return Err(Error::invalid("newsworthy synthesis needs at least one meeting and policy"));
    }
    let mut r = rng(seed);
    let mut out = Vec::new();
    let mut policy_no = 0usize;
    for year in params.start_year..=params.end_year {
        let jan1 = NaiveDate::from_ymd_opt(year, 1, 1).ok_or_else(|| Error::invalid("bad year"))?;
        let step = 364 / params.meetings_per_year.max(1) as i64;
        for k in 0..params.meetings_per_year {
            let date = jan1 + Duration::days(k as i64 * step.max(1));
            let meeting_id = format!("M{year}{k:03}");
            for _ in 0..params.policies_per_meeting {
                policy_no += 1;
                let label = r.random_bool(params.positive_rate);
                let signal_p = if label { params.signal_rate_positive } else { params.signal_rate_negative };
                let topic = TOPICS[r.random_range(0..TOPICS.len())].words;
                let mut policy = picks(&mut r, POLICY_BOILERPLATE, 10);
                policy.extend(picks(&mut r, topic, 6));
                if r.random_bool(signal_p) {
                    let at = r.random_range(0..=policy.len());
                    policy.insert(at, params.signal_token.clone());
                }
                let mut discussion = picks(&mut r, DELIBERATION, 40);
                discussion.extend(picks(&mut r, topic, 5));
                let n_commenters = if r.random_bool(0.1) { r.random_range(1..=3) } else { 0 };
                let comment = (0..n_commenters)
                    .map(|c| {
                        let mut words = picks(&mut r, GENERIC_NEWS, 15);
                        words.push(pick(&mut r, COMMENT_OFFTOPIC).to_string());
                        format!("<SPEAKER {}> spoke for 1 minutes and said: \"{}\"", c + 1, words.join(" "))
                    })
                    .collect::<Vec<_>>()
                    .join(" ");
                out.push(NewsworthyExample {
                    policy_id: format!("{:06}", policy_no),
                    meeting_id: meeting_id.clone(),
                    meeting_date: date,
                    label,
                    policy_text: policy.join(" "),
                    n_prior_meetings: r.random_range(0..4),
                    n_prior_articles: 0,
                    discussion_minutes: (r.random_range(5..120) as f64) / 10.0,
                    n_words: discussion.len(),
                    discussion_text: discussion.join(" "),
                    n_speakers: r.random_range(1..6),
                    n_public_commenters: n_commenters,
                    public_comment_minutes: n_commenters as f64,
                    public_comment_text: comment,
                });
            }
        }
    }
    Ok(out)
}
