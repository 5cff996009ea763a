use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::corpus::Meeting;
use crate::error::{Error, Result};
use crate::learn::{evaluate_binary, train_logistic, EvalReport, LabeledExample, LogisticModel, TrainConfig};
use crate::textvec::{TfIdfModel, TokenizerConfig};
use crate::util::rng;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionExample {
    pub meeting_id: String,
    pub segment: usize,
    pub label: bool,
}

/// A segment is a transition iff a source agenda timestamp lies in its
/// closed interval `[t_start, t_end]`.
pub fn label_transitions(meeting: &Meeting) -> Vec<TransitionExample> {
    let stamps: Vec<f64> = meeting.agenda.iter().filter_map(|a| a.source_timestamp()).collect();
    meeting
        .segments
        .iter()
        .enumerate()
        .map(|(i, s)| TransitionExample {
            meeting_id: meeting.id.clone(),
            segment: i,
            label: stamps.iter().any(|&t| s.t_start <= t && t <= s.t_end),
        })
        .collect()
}

/// Bag-of-words logistic model over segment text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionModel {
    pub space: TfIdfModel,
    pub model: LogisticModel,
}

impl TransitionModel {
    pub fn probability(&self, text: &str) -> f64 {
        self.model.predict_proba(&self.space.transform(text))
    }
}

pub fn train_transition_model(meetings: &[Meeting], config: TrainConfig) -> Result<TransitionModel> {
    let texts: Vec<&str> = meetings
        .iter()
        .flat_map(|m| m.segments.iter().map(|s| s.text.as_str()))
        .collect();
    if texts.is_empty() {
        return Err(Error::EmptyCorpus("transition training needs transcript segments"));
    }
    let space = TfIdfModel::fit(&texts, TokenizerConfig::default())?;
    let examples: Vec<LabeledExample> = meetings
        .iter()
        .flat_map(|m| {
            let space = &space;
            label_transitions(m).into_iter().map(move |ex| {
                LabeledExample::new(
                    format!("{}#{}", ex.meeting_id, ex.segment),
                    space.transform(&m.segments[ex.segment].text),
                    ex.label,
                )
            })
        })
        .collect();
    let model = train_logistic(&examples, Some(space.dim()), config)?;
    Ok(TransitionModel { space, model })
}

/// Held-out report over the labelled segments of `meetings`.
pub fn evaluate_transition_model(model: &TransitionModel, meetings: &[Meeting], threshold: f64) -> EvalReport {
    let scored: Vec<(f64, bool)> = meetings
        .iter()
        .flat_map(|m| {
            label_transitions(m)
                .into_iter()
                .map(move |ex| (model.probability(&m.segments[ex.segment].text), ex.label))
        })
        .collect();
    evaluate_binary(&scored, threshold)
}

/// Seeded per-meeting split; returns `(train, held_out)` ids, each sorted.
pub fn split_meetings(meetings: &[Meeting], held_out_fraction: f64, seed: u64) -> (Vec<String>, Vec<String>) {
    let mut ids: Vec<String> = meetings.iter().map(|m| m.id.clone()).collect();
    ids.sort();
    ids.shuffle(&mut rng(seed));
    let n_held = ((held_out_fraction.clamp(0.0, 1.0)) * ids.len() as f64).round() as usize;
    let mut held: Vec<String> = ids.drain(..n_held).collect();
    held.sort();
    ids.sort();
    (ids, held)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{AgendaItem, TranscriptSegment};
    use chrono::NaiveDate;

    fn meeting(stamps: &[Option<f64>], segs: &[(f64, f64)]) -> Meeting {
        Meeting {
            id: "m".into(),
            date: NaiveDate::from_ymd_opt(2020, 1, 1).unwrap(),
            agenda: stamps.iter().map(|t| AgendaItem::header("X", *t)).collect(),
            segments: segs.iter().map(|&(a, b)| TranscriptSegment::new("s", a, b, "text")).collect(),
            minutes_text: None,
        }
    }

    #[test]
    fn containment_is_closed() {
        let m = meeting(&[Some(120.0), Some(200.0)], &[(100.0, 130.0), (130.5, 180.0), (181.0, 200.0)]);
        let labels: Vec<bool> = label_transitions(&m).iter().map(|e| e.label).collect();
        assert_eq!(labels, vec![true, false, true]);
    }

    #[test]
    fn no_hyperlinks_no_positives() {
        let m = meeting(&[None], &[(0.0, 10.0), (11.0, 20.0)]);
        assert!(label_transitions(&m).iter().all(|e| !e.label));
    }

    #[test]
    fn pegged_stamps_do_not_label() {
        let mut m = meeting(&[Some(5.0)], &[(0.0, 10.0)]);
        m.agenda[0].pegged = true;
        assert!(!label_transitions(&m)[0].label);
    }

    #[test]
    fn single_class_rejected() {
        let m = meeting(&[None], &[(0.0, 10.0), (11.0, 20.0)]);
        assert!(train_transition_model(&[m], TrainConfig::default()).is_err());
    }

    #[test]
    fn split_is_seeded_partition() {
        let ms: Vec<Meeting> = (0..10)
            .map(|i| Meeting {
                id: format!("m{i}"),
                ..meeting(&[], &[])
            })
            .collect();
        let (a, b) = split_meetings(&ms, 0.3, 4);
        assert_eq!((a.len(), b.len()), (7, 3));
        assert_eq!(split_meetings(&ms, 0.3, 4), (a.clone(), b.clone()));
        assert!(b.iter().all(|id| !a.contains(id)));
    }
}
