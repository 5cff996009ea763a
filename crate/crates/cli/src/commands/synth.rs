use clap::Args;

use civiclink::corpus::generate_synthetic_corpus;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::io::create_out;
use crate::manifest::RunManifest;

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub articles: Option<usize>,
    #[arg(long)]
    pub policies: Option<usize>,
    /// Fraction of articles that truly report on a policy.
    #[arg(long)]
    pub link_rate: Option<f64>,
    /// Fraction of agenda timestamps removed.
    #[arg(long)]
    pub drop_rate: Option<f64>,
}

pub fn run(args: SynthArgs, config: &mut RunConfig, command: Vec<String>) -> CliResult<()> {
    let p = &mut config.synth;
    if let Some(n) = args.articles {
        p.n_articles = n;
    }
    if let Some(n) = args.policies {
        p.n_policies = n;
    }
    if let Some(r) = args.link_rate {
        p.link_rate = r;
    }
    if let Some(r) = args.drop_rate {
        p.hyperlink_drop_rate = r;
    }
    p.validate().map_err(|e| CliError::Usage(e.to_string()))?;

    let mut manifest = RunManifest::new(command, config.clone());
    manifest.stage("generate");
    let corpus = generate_synthetic_corpus(config.seed, &config.synth)?;
    manifest.stage("write");
    create_out(&config.out)?;
    corpus.write_to(&config.out)?;
    manifest.finish(&config.out)?;
    println!(
        "wrote {} articles, {} policies, {} meetings, {} gold links to {}",
        corpus.articles.len(),
        corpus.policies.len(),
        corpus.meetings.len(),
        corpus.gold.len(),
        config.out.display()
    );
    Ok(())
}
