use std::collections::BTreeSet;
use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use civiclink::corpus::{write_jsonl, Meeting};
use civiclink::learn::EvalReport;
use civiclink::meetings::{
    align_meetings, comment_space, evaluate_transition_model, section_rollup, split_meetings,
    train_transition_model, write_assignments_csv, write_rollup_csv, CommentAssignment,
};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::io::{create_out, load_corpus, require, write_json, CorpusPaths};
use crate::manifest::RunManifest;

#[derive(Debug, Args)]
pub struct AlignArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Pegging likelihood threshold.
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Debug, Serialize)]
struct AlignReport {
    n_meetings: usize,
    /// Meetings whose every policy item had a source timestamp.
    n_fully_timestamped: usize,
    n_train: usize,
    held_out_ids: Vec<String>,
    transition_eval: Option<EvalReport>,
    n_pegged_items: usize,
    n_commenters: usize,
    n_assignments: usize,
    warnings: Vec<String>,
}

fn fully_timestamped(m: &Meeting) -> bool {
    m.agenda.iter().all(|a| a.source_timestamp().is_some()) && !m.segments.is_empty()
}

pub fn run(args: AlignArgs, config: &mut RunConfig, command: Vec<String>) -> CliResult<()> {
    if let Some(t) = args.threshold {
        config.align.likelihood_threshold = t;
    }
    let paths = CorpusPaths::new(&args.corpus);
    let files = paths.core_files();
    require(&files.each_ref().map(|p| p.as_path()))?;

    let mut manifest = RunManifest::new(command, config.clone());
    for f in &files {
        manifest.add_input(f)?;
    }
    manifest.stage("load");
    let store = load_corpus(&paths, None)?.store;
    let meetings = store.meetings();

    manifest.stage("train_transitions");
    let complete: Vec<Meeting> = meetings.iter().filter(|m| fully_timestamped(m)).cloned().collect();
    if complete.is_empty() {
        return Err(CliError::Data(civiclink::Error::InvalidInput(
            "no meeting has a complete set of agenda timestamps to learn transitions from".into(),
        )));
    }
    let (train_ids, held_ids) = split_meetings(&complete, config.align.held_out_fraction, config.seed);
    let train_set: BTreeSet<&String> = train_ids.iter().collect();
    let train: Vec<Meeting> = complete.iter().filter(|m| train_set.contains(&m.id)).cloned().collect();
    let held: Vec<Meeting> = complete.iter().filter(|m| !train_set.contains(&m.id)).cloned().collect();
    let mut train_config = config.chain.train;
    train_config.seed = config.seed;
    let model = train_transition_model(&train, train_config)?;
    let transition_eval = (!held.is_empty()).then(|| evaluate_transition_model(&model, &held, 0.5));

    manifest.stage("align");
    let space = comment_space(meetings, store.policies())?;
    let aligned = align_meetings(
        meetings,
        store.policies(),
        &model,
        config.align.likelihood_threshold,
        &space,
        config.align.comments,
    )?;
    let pegged: Vec<Meeting> = aligned.iter().map(|a| a.meeting.clone()).collect();
    let assignments: Vec<CommentAssignment> = aligned.iter().flat_map(|a| a.assignments.clone()).collect();
    let warnings: Vec<String> = aligned
        .iter()
        .flat_map(|a| a.warnings.iter().map(move |w| format!("{}: {w}", a.meeting.id)))
        .collect();
    let report = AlignReport {
        n_meetings: meetings.len(),
        n_fully_timestamped: complete.len(),
        n_train: train.len(),
        held_out_ids: held_ids,
        transition_eval,
        n_pegged_items: pegged.iter().flat_map(|m| &m.agenda).filter(|a| a.pegged).count(),
        n_commenters: aligned.iter().map(|a| a.commenters.len()).sum(),
        n_assignments: assignments.len(),
        warnings,
    };

    manifest.stage("write");
    let out = &config.out;
    create_out(out)?;
    write_jsonl(&pegged, out.join("aligned_meetings.jsonl"))?;
    write_assignments_csv(&assignments, out.join("comment_assignments.csv"))?;
    write_rollup_csv(&section_rollup(&pegged), out.join("section_rollup.csv"))?;
    write_json(&model, &out.join("transition_model.json"))?;
    write_json(&report, &out.join("align_report.json"))?;
    manifest.finish(out)?;
    println!(
        "aligned {} meetings, pegged {} items, {} comment assignments",
        report.n_meetings, report.n_pegged_items, report.n_assignments
    );
    if let Some(e) = &report.transition_eval {
        println!("transition classifier held-out F1 {:.3}", e.f1);
    }
    Ok(())
}
