use serde::{Deserialize, Serialize};

use super::transitions::TransitionModel;
use crate::corpus::{AgendaItem, Meeting};

pub const DEFAULT_LIKELIHOOD_THRESHOLD: f64 = 0.8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeggedAgenda {
    pub items: Vec<AgendaItem>,
    pub warnings: Vec<String>,
}

/// Fills missing item timestamps from transition probabilities.
///
/// A missing item takes the start of the first segment that begins after
/// the previous item's timestamp, before the next source timestamp, and
/// scores at least `threshold`. Without such a segment it shares the
/// previous item's timestamp; the first item falls back to 0 s.
pub fn peg_agenda(meeting: &Meeting, model: &TransitionModel, threshold: f64) -> PeggedAgenda {
    let probs: Vec<f64> = meeting.segments.iter().map(|s| model.probability(&s.text)).collect();
    peg_with_probabilities(meeting, &probs, threshold)
}

/// Same rule over precomputed per-segment probabilities.
pub fn peg_with_probabilities(meeting: &Meeting, probs: &[f64], threshold: f64) -> PeggedAgenda {
    let mut items = meeting.agenda.clone();
    let mut warnings = Vec::new();
    let mut prev: Option<f64> = None;
    for i in 0..items.len() {
        if let Some(t) = items[i].source_timestamp() {
            prev = Some(t);
            continue;
        }
        let upper = items[i + 1..]
            .iter()
            .find_map(AgendaItem::source_timestamp)
            .unwrap_or(f64::INFINITY);
        let found = meeting
            .segments
            .iter()
            .zip(probs)
            .find(|(s, &p)| prev.is_none_or(|t| s.t_start > t) && s.t_start < upper && p >= threshold)
            .map(|(s, _)| s.t_start);
        let t = match (found, prev) {
            (Some(t), _) => t,
            (None, Some(t)) => t,
            (None, None) => {
                let msg = format!(
                    "meeting {}: first agenda item {:?} has no qualifying segment; pegged to 0s",
                    meeting.id, items[i].section_header
                );
                log::warn!("{msg}");
                warnings.push(msg);
                0.0
            }
        };
        items[i].timestamp_s = Some(t);
        items[i].pegged = true;
        prev = Some(t);
    }
    PeggedAgenda { items, warnings }
}
