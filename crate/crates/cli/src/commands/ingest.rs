use std::path::PathBuf;

use clap::Args;

use civiclink::corpus::{reconcile_agenda_coverage, write_jsonl};

use crate::config::RunConfig;
use crate::error::CliResult;
use crate::io::{create_out, load_corpus, require, write_json, CorpusPaths, ARTICLES, MEETINGS, POLICIES};
use crate::manifest::RunManifest;

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Directory holding articles.jsonl, policies.jsonl and meetings.jsonl.
    #[arg(long)]
    pub corpus: PathBuf,
}

pub fn run(args: IngestArgs, config: &mut RunConfig, command: Vec<String>) -> CliResult<()> {
    let paths = CorpusPaths::new(&args.corpus);
    let files = paths.core_files();
    require(&files.each_ref().map(|p| p.as_path()))?;

    let mut manifest = RunManifest::new(command, config.clone());
    for f in &files {
        manifest.add_input(f)?;
    }
    manifest.stage("ingest");
    let loaded = load_corpus(&paths, None)?;
    manifest.stage("reconcile");
    let reconciliation = reconcile_agenda_coverage(loaded.store.policies(), loaded.store.meetings());

    manifest.stage("write");
    let out = &config.out;
    create_out(out)?;
    write_jsonl(loaded.store.articles(), out.join(ARTICLES))?;
    write_jsonl(loaded.store.policies(), out.join(POLICIES))?;
    write_jsonl(loaded.store.meetings(), out.join(MEETINGS))?;
    write_json(&loaded.reports, &out.join("ingest_report.json"))?;
    write_json(&reconciliation, &out.join("reconciliation.json"))?;
    manifest.finish(out)?;
    for r in &loaded.reports {
        println!(
            "{:?}: read {} kept {} duplicates {} invalid {}",
            r.kind, r.read, r.kept, r.dropped_dup, r.dropped_invalid
        );
    }
    Ok(())
}
