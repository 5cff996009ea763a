use std::path::PathBuf;

use clap::Args;

use civiclink::analytics::{analyze, emit_reports};
use civiclink::corpus::read_jsonl;
use civiclink::newsworthy::NewsworthyExample;
use civiclink::prmlink::read_link_pairs;

use crate::config::RunConfig;
use crate::error::CliResult;
use crate::io::{create_out, load_corpus, require, write_json, CorpusPaths};
use crate::manifest::RunManifest;

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub links: PathBuf,
    /// Newsworthiness dataset for the discussion comparison.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Topic count for the topic model.
    #[arg(long)]
    pub topics: Option<usize>,
}

pub fn run(args: AnalyzeArgs, config: &mut RunConfig, command: Vec<String>) -> CliResult<()> {
    if let Some(k) = args.topics {
        config.analytics.lda.k = k;
    }
    let paths = CorpusPaths::new(&args.corpus);
    let files = paths.core_files();
    let mut required: Vec<&std::path::Path> = files.iter().map(|p| p.as_path()).collect();
    required.push(&args.links);
    if let Some(d) = &args.dataset {
        required.push(d);
    }
    require(&required)?;

    let mut manifest = RunManifest::new(command, config.clone());
    for p in &required {
        manifest.add_input(p)?;
    }
    manifest.stage("load");
    let store = load_corpus(&paths, None)?.store;
    let links = read_link_pairs(&args.links)?;
    let examples: Vec<NewsworthyExample> = match &args.dataset {
        Some(d) => read_jsonl(d)?,
        None => Vec::new(),
    };

    manifest.stage("analyze");
    let pairs: Vec<(&str, &str)> = links.iter().map(|(a, p)| (a.as_str(), p.as_str())).collect();
    let report = analyze(&store, &pairs, &examples, &config.analytics)?;

    manifest.stage("write");
    create_out(&config.out)?;
    let written = emit_reports(&report, &config.out, config.analytics.top_n)?;
    write_json(&report, &config.out.join("analytics.json"))?;
    manifest.finish(&config.out)?;
    for note in &report.notes {
        log::warn!("{note}");
    }
    if let Some(c) = &report.coverage {
        println!(
            "{} of {} policies covered; {:.1}% of proposals per meeting overall",
            c.n_linked_policies,
            c.n_policies,
            100.0 * c.series.overall_fraction()
        );
    }
    println!("wrote {} report files", written.len() + 1);
    Ok(())
}
