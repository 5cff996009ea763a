//! Agenda and transcript alignment: transition labelling and
//! classification, timestamp pegging, section spans and roll-ups, public
//! commenter detection, comment attribution and per-policy discussion stats.

mod commenters;
mod discussion;
mod peg;
mod sections;
mod transitions;

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use commenters::{
    assign_comments, comment_space, find_public_commenters, speaker_profiles, write_assignments_csv,
    CommentAssignment, CommentConfig, SpeakerProfile,
};
pub use discussion::{item_span, policy_discussion_stats, DiscussionStats};
pub use peg::{peg_agenda, peg_with_probabilities, PeggedAgenda, DEFAULT_LIKELIHOOD_THRESHOLD};
pub use sections::{
    section_rollup, section_spans, section_stats, write_rollup_csv, SectionRollupRow, SectionSpan, SectionStats,
    PUBLIC_COMMENT,
};
pub use transitions::{
    evaluate_transition_model, label_transitions, split_meetings, train_transition_model, TransitionExample,
    TransitionModel,
};

use crate::corpus::{Meeting, PolicyItem};
use crate::error::Result;
use crate::textvec::TfIdfModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignedMeeting {
    /// The meeting with every agenda item timestamped.
    pub meeting: Meeting,
    pub commenters: Vec<SpeakerProfile>,
    pub assignments: Vec<CommentAssignment>,
    pub warnings: Vec<String>,
}

/// Pegs, finds commenters and assigns comments for every meeting in
/// parallel; output keeps the input order.
pub fn align_meetings(
    meetings: &[Meeting],
    policies: &[PolicyItem],
    model: &TransitionModel,
    likelihood_threshold: f64,
    space: &TfIdfModel,
    comments: CommentConfig,
) -> Result<Vec<AlignedMeeting>> {
    let by_id: HashMap<&str, &PolicyItem> = policies.iter().map(|p| (p.id.as_str(), p)).collect();
    Ok(meetings
        .par_iter()
        .map(|m| {
            let pegged = peg_agenda(m, model, likelihood_threshold);
            let meeting = Meeting {
                agenda: pegged.items,
                ..m.clone()
            };
            let commenters = find_public_commenters(&meeting);
            let on_agenda: Vec<&PolicyItem> = meeting.policy_ids().filter_map(|id| by_id.get(id).copied()).collect();
            let assignments = assign_comments(&meeting, &commenters, &on_agenda, space, comments);
            AlignedMeeting {
                meeting,
                commenters,
                assignments,
                warnings: pegged.warnings,
            }
        })
        .collect())
}
