//! Article and policy text assembly from the word pools.

use chrono::{Duration, NaiveDate};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::vocab::*;
use super::{ArticleKind, PlannedPolicy};

pub(crate) fn long_date(d: NaiveDate) -> String {
    d.format("%B %-d, %Y").to_string()
}

pub(crate) fn pick(r: &mut ChaCha8Rng, pool: &[&'static str]) -> &'static str {
    pool.choose(r).copied().expect("non-empty pool")
}

pub(crate) fn picks(r: &mut ChaCha8Rng, pool: &[&'static str], n: usize) -> Vec<String> {
    (0..n).map(|_| pick(r, pool).to_string()).collect()
}

pub(crate) fn capitalize(w: &str) -> String {
    let mut c = w.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// Shuffles chunks and joins them into capitalised sentences.
pub(crate) fn sentences(r: &mut ChaCha8Rng, mut chunks: Vec<String>) -> String {
    chunks.shuffle(r);
    let mut out = Vec::new();
    let mut rest = &chunks[..];
    while !rest.is_empty() {
        let n = r.random_range(8..=14).min(rest.len());
        let (head, tail) = rest.split_at(n);
        let mut s = head.join(" ");
        s = capitalize(&s);
        s.push('.');
        out.push(s);
        rest = tail;
    }
    out.join(" ")
}

pub(crate) fn policy_text(r: &mut ChaCha8Rng, topic: usize, phrases: &[String; 3]) -> (String, String) {
    let kind = pick(r, POLICY_KINDS);
    let tw = TOPICS[topic].words;
    let title = format!(
        "{kind} - {} {} {} {}",
        capitalize(&phrases[0]),
        capitalize(&phrases[1]),
        pick(r, tw),
        pick(r, tw)
    );
    let mut chunks = vec![kind.to_lowercase(), phrases[0].clone(), phrases[1].clone(), phrases[2].clone()];
    chunks.extend(picks(r, POLICY_BOILERPLATE, 9));
    chunks.extend(picks(r, tw, 5));
    chunks.extend(picks(r, &["the", "of", "and", "to", "for", "a"], 8));
    if r.random_bool(0.4) {
        let amount = r.random_range(5..=900) * 10_000;
        chunks.push(format!("in the amount of ${}", group_thousands(amount)));
    }
    (title, sentences(r, chunks))
}

fn group_thousands(n: u64) -> String {
    let s = n.to_string();
    let mut out = String::new();
    for (i, ch) in s.chars().enumerate() {
        if i > 0 && (s.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(ch);
    }
    out
}

pub(crate) fn filler_article(r: &mut ChaCha8Rng) -> (String, String) {
    let pool = *FILLER_TOPICS.choose(r).expect("non-empty");
    let title = format!("{} {} {}", capitalize(pick(r, pool)), pick(r, GENERIC_NEWS), pick(r, pool));
    let mut chunks = picks(r, GENERIC_NEWS, 50);
    chunks.extend(picks(r, pool, 15));
    chunks.extend(picks(r, LIFESTYLE_WORDS, 3));
    (title, sentences(r, chunks))
}

pub(crate) fn policy_article(
    r: &mut ChaCha8Rng,
    kind: ArticleKind,
    plan: &PlannedPolicy,
    vote_date: NaiveDate,
    pub_date: NaiveDate,
    body_name: &str,
) -> (String, String) {
    let tw = TOPICS[plan.topic].words;
    let phrases = &plan.phrases;
    let mut chunks = picks(r, GENERIC_NEWS, 45);
    chunks.extend(picks(r, tw, 6));
    chunks.extend([&phrases[0], &phrases[0], &phrases[1], &phrases[1], &phrases[2]].map(|s| s.to_string()));
    let recent = |r: &mut ChaCha8Rng| pub_date - Duration::days(r.random_range(0..=20));
    let title = match kind {
        ArticleKind::TrueLink | ArticleKind::StaleVote => {
            let mention = if kind == ArticleKind::StaleVote {
                pub_date - Duration::days(r.random_range(45..=300))
            } else {
                vote_date
            };
            chunks.push(format!("the {body_name}"));
            chunks.extend(picks(r, BOARD_CONTEXT, 6));
            chunks.extend(picks(r, VOTE_WORDS, 6));
            chunks.push(format!("on {}", long_date(mention)));
            format!("Supervisors {} {} {}", pick(r, VOTE_WORDS), capitalize(&phrases[0]), pick(r, tw))
        }
        ArticleKind::OtherBody => {
            let other = pick(r, OTHER_BODIES);
            chunks.push(format!("the {other}"));
            chunks.extend(picks(r, BOARD_CONTEXT, 6));
            chunks.extend(picks(r, VOTE_WORDS, 6));
            chunks.push(format!("on {}", long_date(recent(r))));
            format!("County supervisors {} {} {}", pick(r, VOTE_WORDS), capitalize(&phrases[0]), pick(r, tw))
        }
        ArticleKind::BoardChatter => {
            chunks.push(format!("the {body_name}"));
            chunks.extend(picks(r, BOARD_CONTEXT, 6));
            chunks.extend(picks(r, CHATTER_WORDS, 6));
            chunks.push(format!("on {}", long_date(recent(r))));
            format!("Supervisor {} {} {}", pick(r, CHATTER_WORDS), capitalize(&phrases[0]), pick(r, tw))
        }
        ArticleKind::NonBoard => {
            chunks.extend(picks(r, LIFESTYLE_WORDS, 12));
            if r.random_bool(0.5) {
                chunks.push(format!("on {}", long_date(recent(r))));
            }
            format!("{} {} {}", capitalize(&phrases[0]), pick(r, LIFESTYLE_WORDS), pick(r, tw))
        }
        ArticleKind::Filler => return filler_article(r),
    };
    (title, sentences(r, chunks))
}
