//! Seeded synthetic corpus with the structure the link cascade has to cut
//! through: articles off the board beat, board articles that are not about
//! votes, votes by other bodies or long past, and true links that share
//! distinctive vocabulary with their policy. Every draw comes from one seed.

pub(crate) mod text;
mod transcript;
pub(crate) mod vocab;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::Path;

use chrono::{Duration, NaiveDate};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ingest::write_jsonl;
use super::schema::{Annotation, Article, GoldPair, Meeting, PolicyItem, Split};
use super::store::CorpusStore;
use crate::error::{Error, Result};
use crate::util::rng;

pub use transcript::{MeetingTruth, PlantedCommenter};
pub(crate) use vocab::TOPICS;

pub const DEFAULT_BODY_NAME: &str = "San Francisco Board of Supervisors";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthParams {
    pub n_articles: usize,
    pub n_policies: usize,
    /// Planted links as a fraction of `n_articles`.
    pub link_rate: f64,
    pub start_date: NaiveDate,
    pub n_days: u32,
    pub meeting_interval_days: u32,
    /// Articles about a policy's subject with no board coverage.
    pub non_board_rate: f64,
    /// Board coverage that is not about votes or policy.
    pub board_chatter_rate: f64,
    /// Votes by a different governing body.
    pub other_body_rate: f64,
    /// Coverage of a vote long before publication.
    pub stale_vote_rate: f64,
    /// Fraction of policies listed on the calendar but left off every agenda.
    pub agenda_omission_rate: f64,
    /// Fraction of agenda items whose source timestamp is removed.
    pub hyperlink_drop_rate: f64,
    /// Fraction of policy items called together with the previous item.
    pub group_rate: f64,
    pub transcripts: bool,
    pub commenters_per_meeting: usize,
    pub on_topic_comment_rate: f64,
    /// Discussion length multiplier for policies that receive coverage.
    pub covered_discussion_factor: f64,
    pub body_name: String,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            n_articles: 1000,
            n_policies: 500,
            link_rate: 0.05,
            start_date: NaiveDate::from_ymd_opt(2019, 1, 1).unwrap(),
            n_days: 730,
            meeting_interval_days: 7,
            non_board_rate: 0.15,
            board_chatter_rate: 0.08,
            other_body_rate: 0.05,
            stale_vote_rate: 0.05,
            agenda_omission_rate: 0.0,
            hyperlink_drop_rate: 0.0,
            group_rate: 0.05,
            transcripts: true,
            commenters_per_meeting: 4,
            on_topic_comment_rate: 0.5,
            covered_discussion_factor: 2.0,
            body_name: DEFAULT_BODY_NAME.to_string(),
        }
    }
}

impl SynthParams {
    pub fn n_links(&self) -> usize {
        (self.link_rate * self.n_articles as f64).round() as usize
    }

    fn count(&self, rate: f64) -> usize {
        (rate * self.n_articles as f64).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_articles == 0 || self.n_policies == 0 {
            return Err(Error::invalid("synthetic corpus needs at least one article and one policy"));
        }
        if self.n_policies >= 10_000 {
            return Err(Error::invalid("policy ids are 6-digit codes; n_policies must be < 10000"));
        }
        if self.n_days == 0 || self.meeting_interval_days == 0 {
            return Err(Error::invalid("n_days and meeting_interval_days must be positive"));
        }
        let rates = [
            self.link_rate,
            self.non_board_rate,
            self.board_chatter_rate,
            self.other_body_rate,
            self.stale_vote_rate,
            self.agenda_omission_rate,
            self.hyperlink_drop_rate,
            self.group_rate,
            self.on_topic_comment_rate,
        ];
        if rates.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return Err(Error::invalid("rates must lie in [0, 1]"));
        }
        let planted = self.n_links()
            + self.count(self.non_board_rate)
            + self.count(self.board_chatter_rate)
            + self.count(self.other_body_rate)
            + self.count(self.stale_vote_rate);
        if planted > self.n_articles {
            return Err(Error::invalid("link and confound rates exceed the article count"));
        }
        if !(self.covered_discussion_factor >= 1.0) {
            return Err(Error::invalid("covered_discussion_factor must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArticleKind {
    TrueLink,
    NonBoard,
    BoardChatter,
    OtherBody,
    StaleVote,
    Filler,
}

impl ArticleKind {
    pub fn annotation(self, article_id: &str) -> Annotation {
        let (body, votes, recent) = match self {
            ArticleKind::TrueLink => (true, true, true),
            ArticleKind::NonBoard | ArticleKind::Filler => (false, false, false),
            ArticleKind::BoardChatter => (true, false, false),
            ArticleKind::OtherBody | ArticleKind::StaleVote => (true, true, false),
        };
        Annotation {
            article_id: article_id.to_string(),
            covers_body: Some(body),
            covers_votes: Some(votes),
            recent_local_vote: Some(recent),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SyntheticTruth {
    pub article_kinds: BTreeMap<String, ArticleKind>,
    /// Target policy of each confound article.
    pub confound_targets: BTreeMap<String, String>,
    pub links: Vec<(String, String)>,
    pub covered_policies: BTreeSet<String>,
    pub unpassed_policies: BTreeSet<String>,
    pub policy_topics: BTreeMap<String, String>,
    pub meetings: BTreeMap<String, MeetingTruth>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    pub articles: Vec<Article>,
    pub policies: Vec<PolicyItem>,
    pub meetings: Vec<Meeting>,
    pub gold: Vec<GoldPair>,
    /// Generator labels for every article; pipelines sample from these the
    /// way annotators would.
    pub annotations: Vec<Annotation>,
    pub truth: SyntheticTruth,
}

impl SyntheticCorpus {
    pub fn store(&self) -> Result<CorpusStore> {
        CorpusStore::new(self.articles.clone(), self.policies.clone(), self.meetings.clone())
    }

    /// Writes `articles.jsonl`, `policies.jsonl`, `meetings.jsonl`,
    /// `gold.jsonl`, `annotations.jsonl` and `truth.json`.
    pub fn write_to(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_jsonl(&self.articles, dir.join("articles.jsonl"))?;
        write_jsonl(&self.policies, dir.join("policies.jsonl"))?;
        write_jsonl(&self.meetings, dir.join("meetings.jsonl"))?;
        write_jsonl(&self.gold, dir.join("gold.jsonl"))?;
        write_jsonl(&self.annotations, dir.join("annotations.jsonl"))?;
        let truth = serde_json::to_string_pretty(&self.truth)?;
        let path = dir.join("truth.json");
        std::fs::write(&path, truth).map_err(|e| Error::io(&path, e))
    }
}

pub(crate) struct PlannedPolicy {
    pub topic: usize,
    pub phrases: [String; 3],
    pub meeting_idx: Vec<usize>,
}

pub fn generate_synthetic_corpus(seed: u64, params: &SynthParams) -> Result<SyntheticCorpus> {
    params.validate()?;
    let mut r = rng(seed);

    let meeting_dates: Vec<NaiveDate> = (0..)
        .map(|k| k * params.meeting_interval_days)
        .take_while(|&d| d < params.n_days)
        .map(|d| params.start_date + Duration::days(d as i64))
        .collect();
    let n_meetings = meeting_dates.len();
    let meeting_ids: Vec<String> = (0..n_meetings).map(|i| format!("M{:04}", i + 1)).collect();

    // policies
    let mut used_words: HashSet<String> = HashSet::new();
    let mut planned = Vec::with_capacity(params.n_policies);
    let mut policies = Vec::with_capacity(params.n_policies);
    let mut truth = SyntheticTruth::default();
    for i in 0..params.n_policies {
        let topic = r.random_range(0..TOPICS.len());
        let phrases = [
            fresh_word(&mut r, &mut used_words),
            fresh_word(&mut r, &mut used_words),
            fresh_word(&mut r, &mut used_words),
        ];
        let first = r.random_range(0..n_meetings);
        let n_disc = r.random_range(1..=5);
        let mut idx = vec![first];
        while idx.len() < n_disc {
            let next = idx[idx.len() - 1] + r.random_range(1..=3);
            if next >= n_meetings {
                break;
            }
            idx.push(next);
        }
        let introduced = meeting_dates[first] - Duration::days(r.random_range(1..=14));
        let id = format!("{:02}{:04}", introduced.format("%y"), i + 1);
        let (title, description) = text::policy_text(&mut r, topic, &phrases);
        truth.policy_topics.insert(id.clone(), TOPICS[topic].name.to_string());
        policies.push(PolicyItem {
            id,
            title,
            description,
            introduced_date: introduced,
            meeting_ids: idx.iter().map(|&m| meeting_ids[m].clone()).collect(),
        });
        planned.push(PlannedPolicy {
            topic,
            phrases,
            meeting_idx: idx,
        });
    }

    // calendar-only policies
    let n_omit = (params.agenda_omission_rate * params.n_policies as f64).round() as usize;
    let mut order: Vec<usize> = (0..params.n_policies).collect();
    order.shuffle(&mut r);
    let unpassed: HashSet<usize> = order[..n_omit].iter().copied().collect();
    truth.unpassed_policies = unpassed.iter().map(|&i| policies[i].id.clone()).collect();

    // planted links go to policies that reach an agenda
    let n_links = params.n_links();
    let passed: Vec<usize> = order[n_omit..].to_vec();
    if n_links > passed.len() {
        return Err(Error::invalid("more planted links than policies on agendas"));
    }
    let linked: Vec<usize> = passed[..n_links].to_vec();

    // articles
    let mut kinds: Vec<ArticleKind> = Vec::with_capacity(params.n_articles);
    kinds.extend(std::iter::repeat_n(ArticleKind::TrueLink, n_links));
    kinds.extend(std::iter::repeat_n(ArticleKind::NonBoard, params.count(params.non_board_rate)));
    kinds.extend(std::iter::repeat_n(ArticleKind::BoardChatter, params.count(params.board_chatter_rate)));
    kinds.extend(std::iter::repeat_n(ArticleKind::OtherBody, params.count(params.other_body_rate)));
    kinds.extend(std::iter::repeat_n(ArticleKind::StaleVote, params.count(params.stale_vote_rate)));
    kinds.resize(params.n_articles, ArticleKind::Filler);
    kinds.shuffle(&mut r);

    let mut articles = Vec::with_capacity(params.n_articles);
    let mut annotations = Vec::with_capacity(params.n_articles);
    let mut next_link = 0;
    let mut links = Vec::new();
    for (i, kind) in kinds.iter().copied().enumerate() {
        let id = format!("A{:05}", i + 1);
        let (target, pub_date, text) = match kind {
            ArticleKind::Filler => {
                let d = params.start_date + Duration::days(r.random_range(0..params.n_days as i64 + 30));
                (None, d, text::filler_article(&mut r))
            }
            _ => {
                let pi = if kind == ArticleKind::TrueLink {
                    let p = linked[next_link];
                    next_link += 1;
                    p
                } else {
                    r.random_range(0..params.n_policies)
                };
                let plan = &planned[pi];
                let mi = plan.meeting_idx[r.random_range(0..plan.meeting_idx.len())];
                let vote_date = meeting_dates[mi];
                let gap = if kind == ArticleKind::TrueLink {
                    r.random_range(1..=20)
                } else {
                    r.random_range(0..=25)
                };
                let pub_date = vote_date + Duration::days(gap);
                let text = text::policy_article(&mut r, kind, plan, vote_date, pub_date, &params.body_name);
                (Some(pi), pub_date, text)
            }
        };
        if let Some(pi) = target {
            if kind == ArticleKind::TrueLink {
                links.push((id.clone(), policies[pi].id.clone()));
            } else {
                truth.confound_targets.insert(id.clone(), policies[pi].id.clone());
            }
        }
        truth.article_kinds.insert(id.clone(), kind);
        annotations.push(kind.annotation(&id));
        articles.push(Article::new(
            id.clone(),
            format!("https://news.example.com/{}/{}", pub_date.format("%Y/%m/%d"), id.to_lowercase()),
            pub_date,
            text.0,
            text.1,
        ));
    }
    truth.covered_policies = links.iter().map(|(_, p)| p.clone()).collect();

    // gold split
    let mut shuffled = links.clone();
    shuffled.shuffle(&mut r);
    let n_train = shuffled.len().div_ceil(2);
    let mut gold: Vec<GoldPair> = shuffled
        .iter()
        .enumerate()
        .map(|(i, (a, p))| GoldPair {
            article_id: a.clone(),
            policy_id: p.clone(),
            split: if i < n_train { Split::Train } else { Split::Test },
        })
        .collect();
    gold.sort();
    truth.links = links;

    // meetings
    let mut per_meeting: Vec<Vec<usize>> = vec![Vec::new(); n_meetings];
    for (pi, plan) in planned.iter().enumerate() {
        if unpassed.contains(&pi) {
            continue;
        }
        for &mi in &plan.meeting_idx {
            per_meeting[mi].push(pi);
        }
    }
    let covered: HashSet<usize> = linked.iter().copied().collect();
    let mut meetings = Vec::with_capacity(n_meetings);
    for (mi, date) in meeting_dates.iter().enumerate() {
        let mut mr: ChaCha8Rng = rng(seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(mi as u64 + 1)));
        let (meeting, mtruth) = transcript::build_meeting(
            &mut mr,
            &meeting_ids[mi],
            *date,
            &per_meeting[mi],
            &policies,
            &planned,
            &covered,
            params,
        );
        truth.meetings.insert(meeting.id.clone(), mtruth);
        meetings.push(meeting);
    }

    Ok(SyntheticCorpus {
        articles,
        policies,
        meetings,
        gold,
        annotations,
        truth,
    })
}

fn fresh_word(r: &mut ChaCha8Rng, used: &mut HashSet<String>) -> String {
    loop {
        let picks: Vec<usize> = (0..3).map(|_| r.random_range(0..vocab::SYLLABLE_COUNT)).collect();
        let w = vocab::pseudo_word(&picks);
        if used.insert(w.clone()) {
            return w;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{candidate_pairs, reconcile_agenda_coverage};

    fn small() -> SynthParams {
        SynthParams {
            n_articles: 200,
            n_policies: 80,
            link_rate: 0.05,
            n_days: 180,
            ..SynthParams::default()
        }
    }

    #[test]
    fn same_seed_same_bytes() {
        let a = generate_synthetic_corpus(9, &small()).unwrap();
        let b = generate_synthetic_corpus(9, &small()).unwrap();
        let da = tempfile::tempdir().unwrap();
        let db = tempfile::tempdir().unwrap();
        a.write_to(da.path()).unwrap();
        b.write_to(db.path()).unwrap();
        for f in ["articles.jsonl", "policies.jsonl", "meetings.jsonl", "gold.jsonl", "annotations.jsonl", "truth.json"] {
            assert_eq!(std::fs::read(da.path().join(f)).unwrap(), std::fs::read(db.path().join(f)).unwrap(), "{f}");
        }
        let c = generate_synthetic_corpus(10, &small()).unwrap();
        assert_ne!(a.articles, c.articles);
    }

    #[test]
    fn zero_link_rate_gives_no_gold() {
        let p = SynthParams {
            link_rate: 0.0,
            ..small()
        };
        assert!(generate_synthetic_corpus(1, &p).unwrap().gold.is_empty());
    }

    #[test]
    fn zero_documents_rejected() {
        let p = SynthParams {
            n_articles: 0,
            ..small()
        };
        assert!(generate_synthetic_corpus(1, &p).is_err());
    }

    #[test]
    fn default_params_plant_fifty_links_split_evenly() {
        let c = generate_synthetic_corpus(42, &SynthParams::default()).unwrap();
        assert_eq!(c.gold.len(), 50);
        assert_eq!(c.gold.iter().filter(|g| g.split == Split::Train).count(), 25);
        assert_eq!(c.articles.len(), 1000);
        assert_eq!(c.policies.len(), 500);
    }

    #[test]
    fn gold_pairs_are_window_candidates() {
        let c = generate_synthetic_corpus(5, &small()).unwrap();
        let store = c.store().unwrap();
        let pairs = candidate_pairs(store.articles(), store.policies(), &store.meeting_dates(), 31).unwrap();
        let keys: HashSet<_> = pairs.iter().map(|p| (p.article_id.clone(), p.policy_id.clone())).collect();
        for g in &c.gold {
            assert!(keys.contains(&(g.article_id.clone(), g.policy_id.clone())));
        }
    }

    #[test]
    fn omission_bookkeeping_matches_reconciliation() {
        let p = SynthParams {
            agenda_omission_rate: 0.1,
            ..small()
        };
        let c = generate_synthetic_corpus(3, &p).unwrap();
        let report = reconcile_agenda_coverage(&c.policies, &c.meetings);
        assert_eq!(report.unpassed, 8);
        let want: Vec<String> = c.truth.unpassed_policies.iter().cloned().collect();
        assert_eq!(report.unpassed_ids, want);
    }

    #[test]
    fn policy_ids_are_six_digits_and_unique() {
        let c = generate_synthetic_corpus(2, &small()).unwrap();
        let ids: HashSet<_> = c.policies.iter().map(|p| p.id.clone()).collect();
        assert_eq!(ids.len(), c.policies.len());
        assert!(c.policies.iter().all(|p| p.id.len() == 6 && p.id.chars().all(|ch| ch.is_ascii_digit())));
    }
}
