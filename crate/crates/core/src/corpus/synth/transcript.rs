//! Meeting agendas and diarized transcripts with planted item transitions.

use std::collections::HashSet;

use chrono::NaiveDate;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::text::{capitalize, pick, picks};
use super::vocab::*;
use super::{PlannedPolicy, SynthParams};
use crate::corpus::schema::{AgendaItem, Meeting, PolicyItem, TranscriptSegment};

const CHAIR: &str = "SPEAKER_00";
const CLERK: &str = "SPEAKER_01";
const N_SUPERVISORS: usize = 9;
const N_STAFF: usize = 4;
const PUBLIC_BASE: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedCommenter {
    pub speaker_id: String,
    /// Policy the comment is about; `None` for off-topic comments.
    pub policy_id: Option<String>,
}

/// Ground truth for one generated meeting, indexed like the agenda.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MeetingTruth {
    pub item_timestamps: Vec<f64>,
    pub item_segment: Vec<usize>,
    /// Source timestamp removed by the generator.
    pub dropped: Vec<bool>,
    /// Called together with the previous item; shares its timestamp.
    pub grouped: Vec<bool>,
    /// Segments spoken under each item (transition included).
    pub item_segments: Vec<Vec<usize>>,
    pub section_seconds: Vec<(String, f64)>,
    pub commenters: Vec<PlantedCommenter>,
}

struct Timeline {
    segments: Vec<TranscriptSegment>,
    t: f64,
}

impl Timeline {
    fn say(&mut self, r: &mut ChaCha8Rng, speaker: &str, text: String) -> usize {
        let words = text.split_whitespace().count().max(1) as f64;
        let start = self.t;
        let end = start + words * r.random_range(0.35..0.5) + 0.5;
        self.segments.push(TranscriptSegment::new(speaker, round2(start), round2(end), text));
        self.t = end + r.random_range(0.5..2.0);
        self.segments.len() - 1
    }
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

fn supervisor(r: &mut ChaCha8Rng) -> String {
    format!("SPEAKER_{:02}", 2 + r.random_range(0..N_SUPERVISORS))
}

fn discussant(r: &mut ChaCha8Rng) -> String {
    if r.random_bool(0.75) {
        supervisor(r)
    } else {
        format!("SPEAKER_{:02}", 2 + N_SUPERVISORS + r.random_range(0..N_STAFF))
    }
}

fn policy_words(r: &mut ChaCha8Rng, plan: &PlannedPolicy, n_phrases: usize, n_topic: usize) -> Vec<String> {
    let mut w: Vec<String> = (0..n_phrases).map(|i| plan.phrases[i % 3].clone()).collect();
    w.extend(picks(r, TOPICS[plan.topic].words, n_topic));
    w
}

fn speech(r: &mut ChaCha8Rng, mut words: Vec<String>) -> String {
    use rand::seq::SliceRandom;
    words.shuffle(r);
    let mut s = capitalize(&words.join(" "));
    s.push('.');
    s
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn build_meeting(
    r: &mut ChaCha8Rng,
    id: &str,
    date: NaiveDate,
    items: &[usize],
    policies: &[PolicyItem],
    planned: &[PlannedPolicy],
    covered: &HashSet<usize>,
    params: &SynthParams,
) -> (Meeting, MeetingTruth) {
    // section assignment, then id order within each section
    let policy_sections: Vec<&str> = MEETING_SECTIONS.iter().filter(|s| s.1).map(|s| s.0).collect();
    let mut by_section: Vec<Vec<usize>> = vec![Vec::new(); policy_sections.len()];
    for &pi in items {
        let u: f64 = r.random();
        let s = if u < 0.3 { 0 } else if u < 0.8 { 1 } else { 2 };
        by_section[s.min(policy_sections.len() - 1)].push(pi);
    }
    for v in &mut by_section {
        v.sort_by(|a, b| policies[*a].id.cmp(&policies[*b].id));
    }

    enum Slot {
        Header(&'static str),
        Policy(&'static str, usize, bool),
    }
    let mut slots = Vec::new();
    let mut si = 0;
    for &(header, carries) in MEETING_SECTIONS {
        slots.push(Slot::Header(header));
        if carries {
            for (k, &pi) in by_section[si].iter().enumerate() {
                let grouped = k > 0 && r.random_bool(params.group_rate);
                slots.push(Slot::Policy(header, pi, grouped));
            }
            si += 1;
        }
    }

    let minutes = {
        let titles: Vec<String> = items.iter().map(|&pi| policies[pi].title.clone()).collect();
        format!("Minutes of the regular meeting. Items considered: {}.", titles.join("; "))
    };

    let mut agenda = Vec::with_capacity(slots.len());
    let mut truth = MeetingTruth::default();

    if !params.transcripts {
        for slot in &slots {
            agenda.push(match slot {
                Slot::Header(h) => AgendaItem::header(*h, None),
                Slot::Policy(h, pi, _) => AgendaItem::policy(*h, policies[*pi].id.clone(), None),
            });
        }
        let meeting = Meeting {
            id: id.to_string(),
            date,
            agenda,
            segments: Vec::new(),
            minutes_text: Some(minutes),
        };
        return (meeting, truth);
    }

    let mut tl = Timeline {
        segments: Vec::new(),
        t: 0.0,
    };
    tl.say(r, CHAIR, "Good afternoon and welcome to the regular meeting of the board.".to_string());

    let mut item_no = 0;
    let mut commenter_no = 0;
    for slot in &slots {
        item_no += 1;
        match slot {
            Slot::Header(header) => {
                let seg = tl.say(r, CHAIR, section_transition(header).to_string());
                let mut segs = vec![seg];
                match *header {
                    "ROLL CALL" => {
                        for s in 0..N_SUPERVISORS {
                            let name = PERSON_NAMES[s % PERSON_NAMES.len()];
                            segs.push(tl.say(r, CLERK, format!("Supervisor {name}.")));
                            segs.push(tl.say(r, &format!("SPEAKER_{:02}", 2 + s), "Present.".to_string()));
                        }
                        segs.push(tl.say(r, CLERK, "Madam President, all members are present.".to_string()));
                    }
                    "APPROVAL OF MEETING MINUTE" => {
                        segs.push(tl.say(
                            r,
                            CHAIR,
                            "Colleagues, are there any changes to the minutes? Seeing none, the minutes are approved."
                                .to_string(),
                        ));
                    }
                    "PUBLIC COMMENT" => {
                        for _ in 0..params.commenters_per_meeting {
                            let speaker = format!("SPEAKER_{}", PUBLIC_BASE + commenter_no);
                            commenter_no += 1;
                            segs.push(tl.say(r, CLERK, "Welcome, speaker. You have two minutes.".to_string()));
                            let target = if !items.is_empty() && r.random_bool(params.on_topic_comment_rate) {
                                Some(items[r.random_range(0..items.len())])
                            } else {
                                None
                            };
                            let turns = if r.random_bool(0.2) { 2 } else { 1 };
                            for _ in 0..turns {
                                let mut words = picks(r, GENERIC_NEWS, 18);
                                match target {
                                    Some(pi) => words.extend(policy_words(r, &planned[pi], 4, 5)),
                                    None => words.extend(picks(r, COMMENT_OFFTOPIC, 8)),
                                }
                                let opener = pick(r, COMMENT_OPENERS);
                                let name = pick(r, PERSON_NAMES);
                                let text = format!("{opener} {name}. {}", speech(r, words));
                                segs.push(tl.say(r, &speaker, text));
                            }
                            truth.commenters.push(PlantedCommenter {
                                speaker_id: speaker,
                                policy_id: target.map(|pi| policies[pi].id.clone()),
                            });
                        }
                        segs.push(tl.say(r, CHAIR, "Public comment is now closed.".to_string()));
                    }
                    _ => {}
                }
                truth.item_timestamps.push(tl.segments[seg].t_start);
                truth.item_segment.push(seg);
                truth.item_segments.push(segs);
                truth.grouped.push(false);
                agenda.push(AgendaItem::header(*header, None));
            }
            Slot::Policy(header, pi, grouped) => {
                let id = policies[*pi].id.clone();
                if *grouped {
                    let prev = truth.item_segment.len() - 1;
                    truth.item_timestamps.push(truth.item_timestamps[prev]);
                    truth.item_segment.push(truth.item_segment[prev]);
                    truth.item_segments.push(Vec::new());
                    truth.grouped.push(true);
                    agenda.push(AgendaItem::policy(*header, id, None));
                    continue;
                }
                let template = pick(r, ITEM_TRANSITIONS);
                let seg = tl.say(r, CHAIR, template.replace("{n}", &item_no.to_string()));
                let mut segs = vec![seg];
                let base = if *header == "CONSENT AGENDA" { 1 } else { r.random_range(1..=3) };
                let n = if covered.contains(pi) {
                    (base as f64 * params.covered_discussion_factor).round() as usize
                } else {
                    base
                };
                for _ in 0..n {
                    let n_words = r.random_range(15..=35);
                    let mut words = picks(r, DELIBERATION, n_words);
                    words.extend(picks(r, GENERIC_NEWS, 10));
                    words.extend(policy_words(r, &planned[*pi], 3, 4));
                    let who = discussant(r);
                    let text = speech(r, words);
                    segs.push(tl.say(r, &who, text));
                }
                truth.item_timestamps.push(tl.segments[seg].t_start);
                truth.item_segment.push(seg);
                truth.item_segments.push(segs);
                truth.grouped.push(false);
                agenda.push(AgendaItem::policy(*header, id, None));
            }
        }
    }

    // source timestamps; grouped items never carry one
    let end = tl.segments.last().map_or(0.0, |s| s.t_end);
    for (i, item) in agenda.iter_mut().enumerate() {
        let drop = !truth.grouped[i] && r.random_bool(params.hyperlink_drop_rate);
        truth.dropped.push(drop);
        if !drop && !truth.grouped[i] {
            item.timestamp_s = Some(truth.item_timestamps[i]);
        }
    }
    let header_idx: Vec<usize> = (0..agenda.len()).filter(|&i| agenda[i].is_header()).collect();
    for (k, &h) in header_idx.iter().enumerate() {
        let stop = header_idx.get(k + 1).map_or(end, |&n| truth.item_timestamps[n]);
        truth
            .section_seconds
            .push((agenda[h].section_header.clone(), stop - truth.item_timestamps[h]));
    }

    let meeting = Meeting {
        id: id.to_string(),
        date,
        agenda,
        segments: tl.segments,
        minutes_text: Some(minutes),
    };
    (meeting, truth)
}
