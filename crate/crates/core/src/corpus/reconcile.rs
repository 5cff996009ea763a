use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::schema::{Meeting, PolicyItem};

/// Which calendar-listed policies actually show up on a meeting agenda.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReconciliationReport {
    pub total_policies: usize,
    /// Appear on at least one agenda.
    pub on_agenda: usize,
    /// Listed on the calendar but absent from every agenda.
    pub unpassed: usize,
    pub unpassed_ids: Vec<String>,
    /// Agenda references to ids missing from the policy list.
    pub agenda_only_ids: Vec<String>,
    /// How many unpassed policies are in `covered_ids`, when supplied.
    pub unpassed_covered: Option<usize>,
    pub covered_total: Option<usize>,
}

pub fn reconcile_agenda_coverage(policies: &[PolicyItem], meetings: &[Meeting]) -> ReconciliationReport {
    reconcile_with_coverage(policies, meetings, None)
}

/// Also splits a covered-policy set across the two partitions, so both the
/// covered-and-unpassed count and the overall covered count are reported.
pub fn reconcile_with_coverage(
    policies: &[PolicyItem],
    meetings: &[Meeting],
    covered_ids: Option<&HashSet<String>>,
) -> ReconciliationReport {
    let on_agenda: HashSet<&str> = meetings.iter().flat_map(|m| m.policy_ids()).collect();
    let known: HashSet<&str> = policies.iter().map(|p| p.id.as_str()).collect();
    let mut unpassed_ids: Vec<String> = policies
        .iter()
        .filter(|p| !on_agenda.contains(p.id.as_str()))
        .map(|p| p.id.clone())
        .collect();
    unpassed_ids.sort();
    let mut agenda_only_ids: Vec<String> = on_agenda
        .iter()
        .filter(|id| !known.contains(*id))
        .map(|s| s.to_string())
        .collect();
    agenda_only_ids.sort();
    let unpassed_covered =
        covered_ids.map(|cov| unpassed_ids.iter().filter(|id| cov.contains(id.as_str())).count());
    ReconciliationReport {
        total_policies: policies.len(),
        on_agenda: policies.len() - unpassed_ids.len(),
        unpassed: unpassed_ids.len(),
        unpassed_ids,
        agenda_only_ids,
        unpassed_covered,
        covered_total: covered_ids.map(|c| c.len()),
    }
}
