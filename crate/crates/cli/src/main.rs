//! `civiclink`: run the linking, alignment, newsworthiness and analytics
//! pipeline from the command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 failed check.

mod commands;
mod config;
mod error;
mod io;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "civiclink", version, about = "Link local news to policy proposals and rank newsworthiness")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; defaults to the available cores.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate and deduplicate corpus JSONL files.
    Ingest(commands::ingest::IngestArgs),
    /// Generate a seeded synthetic corpus with ground truth.
    Synth(commands::synth::SynthArgs),
    /// Peg agenda timestamps and attribute public comments.
    Align(commands::align::AlignArgs),
    /// Score candidate article/policy pairs and emit links.
    Link(commands::link::LinkArgs),
    /// Build, train, rank, evaluate and ablate newsworthiness models.
    #[command(subcommand)]
    Newsworthy(commands::newsworthy::NewsworthyCommand),
    /// Coverage, word deltas, discussion comparison and topic reports.
    Analyze(commands::analyze::AnalyzeArgs),
    /// Summarize a run directory and apply threshold checks.
    Report(commands::report::ReportArgs),
}

fn resolve(global: &GlobalArgs) -> CliResult<RunConfig> {
    let mut config = match &global.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = global.seed {
        config.seed = seed;
    }
    if global.jobs.is_some() {
        config.jobs = global.jobs;
    }
    if let Some(out) = &global.out {
        config.out = out.clone();
    }
    config.finalize()
}

fn run(cli: Cli, argv: Vec<String>) -> CliResult<()> {
    let mut config = resolve(&cli.global)?;
    if let Some(jobs) = config.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let command = argv.into_iter().skip(1).collect();
    match cli.command {
        Command::Ingest(a) => commands::ingest::run(a, &mut config, command),
        Command::Synth(a) => commands::synth::run(a, &mut config, command),
        Command::Align(a) => commands::align::run(a, &mut config, command),
        Command::Link(a) => commands::link::run(a, &mut config, command),
        Command::Newsworthy(c) => commands::newsworthy::run(c, &mut config, command),
        Command::Analyze(a) => commands::analyze::run(a, &mut config, command),
        Command::Report(a) => commands::report::run(a, &mut config, command),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli, argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
