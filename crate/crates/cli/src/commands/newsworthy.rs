use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Subcommand};
use serde::{Deserialize, Serialize};

use civiclink::corpus::{read_jsonl, write_jsonl};
use civiclink::meetings::{assign_comments, comment_space, find_public_commenters, CommentAssignment};
use civiclink::newsworthy::{
    assemble_prompt, build_dataset, generate_newsworthy_dataset, rank_metrics, run_cutoff_grid, run_section_grid,
    score_prompts, temporal_split, train_ranker, write_grid_csv, group_by_meeting, GridSettings, LinkIndex,
    MrrMode, NewsworthyExample, PromptConfig, PromptRecord, PromptScorer, PromptSections, RankMetrics,
    RankerModel, ScoredPrompt, DEFAULT_K,
};
use civiclink::prmlink::{read_link_pairs, ExternalYesNoClient};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::io::{create_out, load_corpus, read_json, require, write_json, CorpusPaths};
use crate::manifest::RunManifest;

pub const DATASET: &str = "dataset.jsonl";
pub const MODEL: &str = "ranker.json";

#[derive(Debug, Subcommand)]
pub enum NewsworthyCommand {
    /// Label every (meeting, policy) pair from a link set and write the dataset and prompts.
    Build(BuildArgs),
    /// Generate a synthetic dataset with a planted, time-invariant signal.
    Synth,
    /// Train the prompt ranker on the pre-cutoff split.
    Train(ModelArgs),
    /// Rank one meeting's policies.
    Rank(RankArgs),
    /// Score the post-cutoff split.
    Eval(ScorerArgs),
    /// Retrain over a grid of prompt sections or training cutoffs.
    Ablate(AblateArgs),
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Links CSV with article_id,policy_id leading columns.
    #[arg(long)]
    pub links: PathBuf,
    /// Timestamped meetings replacing the corpus meeting file, e.g. from `align`.
    #[arg(long)]
    pub meetings: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    /// Prompt sections, e.g. "full", "1,2" or "(2), (3)".
    #[arg(long)]
    pub sections: Option<String>,
    /// Split date; examples on or after it are the test set.
    #[arg(long)]
    pub cutoff: Option<chrono::NaiveDate>,
}

#[derive(Debug, Args)]
pub struct ScorerArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    /// Ranker written by `newsworthy train`.
    #[arg(long, required_unless_present = "external")]
    pub model: Option<PathBuf>,
    /// Score prompts with the external yes/no client instead.
    #[arg(long)]
    pub external: bool,
    #[arg(long)]
    pub cutoff: Option<chrono::NaiveDate>,
    /// Average reciprocal rank of each meeting's first positive only.
    #[arg(long)]
    pub first_hit_mrr: bool,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[command(flatten)]
    pub scorer: ScorerArgs,
    #[arg(long)]
    pub meeting: String,
    #[arg(long, default_value_t = DEFAULT_K)]
    pub top: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum GridKind {
    Sections,
    Cutoff,
}

#[derive(Debug, Args)]
pub struct AblateArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, value_enum, default_value = "sections")]
    pub grid: GridKind,
}

/// A trained ranker with the prompt settings it was trained on.
#[derive(Debug, Serialize, Deserialize)]
struct RankerBundle {
    sections: PromptSections,
    prompt: PromptConfig,
    ranker: RankerModel,
}

#[derive(Debug, Serialize)]
struct TrainSummary {
    sections: String,
    n_train: usize,
    n_train_positive: usize,
    n_test: usize,
}

pub fn run(cmd: NewsworthyCommand, config: &mut RunConfig, command: Vec<String>) -> CliResult<()> {
    match cmd {
        NewsworthyCommand::Build(a) => build(a, config, command),
        NewsworthyCommand::Synth => synth(config, command),
        NewsworthyCommand::Train(a) => train(a, config, command),
        NewsworthyCommand::Rank(a) => rank(a, config, command),
        NewsworthyCommand::Eval(a) => eval(a, config, command),
        NewsworthyCommand::Ablate(a) => ablate(a, config, command),
    }
}

fn parse_sections(text: &str) -> CliResult<PromptSections> {
    text.parse().map_err(|e: civiclink::Error| CliError::Usage(e.to_string()))
}

/// Deterministic prompt file name for one example.
fn prompt_file_name(e: &NewsworthyExample) -> String {
    let clean = |s: &str| s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect::<String>();
    format!("{}__{}.txt", clean(&e.meeting_id), clean(&e.policy_id))
}

fn build(args: BuildArgs, config: &mut RunConfig, command: Vec<String>) -> CliResult<()> {
    let paths = CorpusPaths::new(&args.corpus);
    let files = paths.core_files();
    let mut required: Vec<&Path> = files.iter().map(|p| p.as_path()).collect();
    required.push(&args.links);
    if let Some(m) = &args.meetings {
        required.push(m);
    }
    require(&required)?;

    let mut manifest = RunManifest::new(command, config.clone());
    for p in &required {
        manifest.add_input(p)?;
    }
    manifest.stage("load");
    let store = load_corpus(&paths, args.meetings.as_deref())?.store;
    let links = read_link_pairs(&args.links)?;
    let index = LinkIndex::new(links.iter().map(|(a, p)| (a.as_str(), p.as_str())), &store);

    manifest.stage("comments");
    let space = comment_space(store.meetings(), store.policies())?;
    let mut assignments: Vec<CommentAssignment> = Vec::new();
    for m in store.meetings() {
        let commenters = find_public_commenters(m);
        let on_agenda: Vec<_> = m.policy_ids().filter_map(|id| store.policy(id)).collect();
        assignments.extend(assign_comments(m, &commenters, &on_agenda, &space, config.align.comments));
    }

    manifest.stage("features");
    let examples = build_dataset(store.meetings(), &store, &index, &assignments)?;
    let sections = parse_sections(&config.newsworthy.sections)?;

    manifest.stage("write");
    let out = &config.out;
    create_out(out)?;
    write_jsonl(&examples, out.join(DATASET))?;
    let prompt_dir = out.join("prompts");
    create_out(&prompt_dir)?;
    for e in &examples {
        let record = assemble_prompt(e, sections, config.newsworthy.prompt);
        let path = prompt_dir.join(prompt_file_name(e));
        fs::write(&path, record.text + "\n").map_err(|err| CliError::io(&path, err))?;
    }
    manifest.finish(out)?;
    let n_pos = examples.iter().filter(|e| e.label).count();
    println!("{} examples, {} newsworthy", examples.len(), n_pos);
    Ok(())
}

fn synth(config: &mut RunConfig, command: Vec<String>) -> CliResult<()> {
    let mut manifest = RunManifest::new(command, config.clone());
    manifest.stage("generate");
    let examples = generate_newsworthy_dataset(config.seed, &config.newsworthy.synth)?;
    manifest.stage("write");
    create_out(&config.out)?;
    write_jsonl(&examples, config.out.join(DATASET))?;
    manifest.finish(&config.out)?;
    println!("{} synthetic examples", examples.len());
    Ok(())
}

fn load_dataset(path: &Path, manifest: &mut RunManifest) -> CliResult<Vec<NewsworthyExample>> {
    manifest.add_input(path)?;
    manifest.stage("load");
    Ok(read_jsonl(path)?)
}

fn prompts(examples: &[NewsworthyExample], sections: PromptSections, config: PromptConfig) -> Vec<PromptRecord> {
    examples.iter().map(|e| assemble_prompt(e, sections, config)).collect()
}

fn train(args: ModelArgs, config: &mut RunConfig, command: Vec<String>) -> CliResult<()> {
    if let Some(s) = args.sections {
        config.newsworthy.sections = s;
    }
    if let Some(c) = args.cutoff {
        config.newsworthy.split.cutoff = c;
    }
    let sections = parse_sections(&config.newsworthy.sections)?;
    require(&[&args.dataset])?;
    let mut manifest = RunManifest::new(command, config.clone());
    let examples = load_dataset(&args.dataset, &mut manifest)?;

    manifest.stage("train");
    let (train_set, test_set) = temporal_split(&examples, &config.newsworthy.split)?;
    let mut train_config = config.chain.train;
    train_config.seed = config.seed;
    let ranker = train_ranker(&prompts(&train_set, sections, config.newsworthy.prompt), train_config)?;
    let summary = TrainSummary {
        sections: sections.to_string(),
        n_train: train_set.len(),
        n_train_positive: train_set.iter().filter(|e| e.label).count(),
        n_test: test_set.len(),
    };

    manifest.stage("write");
    create_out(&config.out)?;
    let bundle = RankerBundle {
        sections,
        prompt: config.newsworthy.prompt,
        ranker,
    };
    write_json(&bundle, &config.out.join(MODEL))?;
    write_json(&summary, &config.out.join("train_summary.json"))?;
    manifest.finish(&config.out)?;
    println!("trained on {} examples ({} newsworthy)", summary.n_train, summary.n_train_positive);
    Ok(())
}

enum Scorer {
    Ranker(RankerBundle),
    External(ExternalYesNoClient),
}

impl Scorer {
    fn load(args: &ScorerArgs, config: &RunConfig, manifest: &mut RunManifest) -> CliResult<Self> {
        if args.external {
            return Ok(Scorer::External(ExternalYesNoClient::new(config.external.clone().with_env())?));
        }
        let path = args.model.as_ref().ok_or_else(|| CliError::Usage("--model is required".into()))?;
        manifest.add_input(path)?;
        Ok(Scorer::Ranker(read_json(path)?))
    }

    fn as_dyn(&self) -> &dyn PromptScorer {
        match self {
            Scorer::Ranker(b) => &b.ranker,
            Scorer::External(c) => c,
        }
    }

    fn prompt_settings(&self, config: &RunConfig) -> CliResult<(PromptSections, PromptConfig)> {
        match self {
            Scorer::Ranker(b) => Ok((b.sections, b.prompt)),
            Scorer::External(_) => Ok((parse_sections(&config.newsworthy.sections)?, config.newsworthy.prompt)),
        }
    }

    fn finish(&self) -> CliResult<()> {
        if let Scorer::External(c) = self {
            c.save_cache()?;
        }
        Ok(())
    }
}

fn write_rankings(scored: &[ScoredPrompt], path: &Path, top: Option<usize>) -> CliResult<usize> {
    let mut text = String::from("meeting_id,rank,policy_id,score,label\n");
    let mut rows = 0;
    for list in group_by_meeting(scored) {
        for (i, e) in list.entries.iter().take(top.unwrap_or(usize::MAX)).enumerate() {
            text.push_str(&format!("{},{},{},{},{}\n", list.meeting_id, i + 1, e.policy_id, e.score, e.label));
            rows += 1;
        }
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))?;
    Ok(rows)
}

fn scorer_inputs(args: &ScorerArgs) -> Vec<&Path> {
    let mut v: Vec<&Path> = vec![&args.dataset];
    if !args.external {
        if let Some(m) = &args.model {
            v.push(m);
        }
    }
    v
}

fn eval(args: ScorerArgs, config: &mut RunConfig, command: Vec<String>) -> CliResult<()> {
    if let Some(c) = args.cutoff {
        config.newsworthy.split.cutoff = c;
    }
    require(&scorer_inputs(&args))?;
    let mut manifest = RunManifest::new(command, config.clone());
    let scorer = Scorer::load(&args, config, &mut manifest)?;
    let examples = load_dataset(&args.dataset, &mut manifest)?;
    let (sections, prompt) = scorer.prompt_settings(config)?;

    manifest.stage("score");
    let test: Vec<NewsworthyExample> = examples
        .into_iter()
        .filter(|e| e.meeting_date >= config.newsworthy.split.cutoff)
        .collect();
    if test.is_empty() {
        return Err(CliError::Data(civiclink::Error::EmptySplit("test")));
    }
    let scored = score_prompts(scorer.as_dyn(), &prompts(&test, sections, prompt))?;
    let mode = if args.first_hit_mrr { MrrMode::FirstHit } else { MrrMode::PerPositive };
    let metrics: RankMetrics = rank_metrics(&scored, DEFAULT_K, mode)?;

    manifest.stage("write");
    create_out(&config.out)?;
    write_json(&metrics, &config.out.join("metrics.json"))?;
    write_rankings(&scored, &config.out.join("rankings.csv"), None)?;
    scorer.finish()?;
    manifest.finish(&config.out)?;
    println!(
        "F1 {:.3} ROC {:.3} R@10 {:.3} MRR {:.3} over {} policies",
        metrics.f1, metrics.roc_auc, metrics.recall_at_10, metrics.mrr, metrics.n_test
    );
    Ok(())
}

fn rank(args: RankArgs, config: &mut RunConfig, command: Vec<String>) -> CliResult<()> {
    require(&scorer_inputs(&args.scorer))?;
    let mut manifest = RunManifest::new(command, config.clone());
    let scorer = Scorer::load(&args.scorer, config, &mut manifest)?;
    let examples = load_dataset(&args.scorer.dataset, &mut manifest)?;
    let (sections, prompt) = scorer.prompt_settings(config)?;

    manifest.stage("score");
    let meeting: Vec<NewsworthyExample> = examples.into_iter().filter(|e| e.meeting_id == args.meeting).collect();
    if meeting.is_empty() {
        return Err(CliError::Data(civiclink::Error::UnknownId {
            kind: "meeting",
            id: args.meeting,
        }));
    }
    let scored = score_prompts(scorer.as_dyn(), &prompts(&meeting, sections, prompt))?;

    manifest.stage("write");
    create_out(&config.out)?;
    let rows = write_rankings(&scored, &config.out.join("ranking.csv"), Some(args.top))?;
    scorer.finish()?;
    manifest.finish(&config.out)?;
    println!("ranked {} of {} policies for {}", rows, scored.len(), args.meeting);
    Ok(())
}

fn ablate(args: AblateArgs, config: &mut RunConfig, command: Vec<String>) -> CliResult<()> {
    require(&[&args.dataset])?;
    let grid: Vec<PromptSections> = config
        .newsworthy
        .section_grid
        .iter()
        .map(|s| parse_sections(s))
        .collect::<CliResult<_>>()?;
    let mut manifest = RunManifest::new(command, config.clone());
    let examples = load_dataset(&args.dataset, &mut manifest)?;
    let mut train = config.chain.train;
    train.seed = config.seed;
    let settings = GridSettings {
        split: config.newsworthy.split,
        prompt: config.newsworthy.prompt,
        train,
    };

    manifest.stage("grid");
    let (rows, name) = match args.grid {
        GridKind::Sections => (run_section_grid(&examples, &grid, &settings)?, "sections_grid.csv"),
        GridKind::Cutoff => (
            run_cutoff_grid(&examples, &config.newsworthy.cutoff_years, &settings)?,
            "cutoff_grid.csv",
        ),
    };

    manifest.stage("write");
    create_out(&config.out)?;
    write_grid_csv(&rows, config.out.join(name))?;
    manifest.finish(&config.out)?;
    for r in &rows {
        match &r.metrics {
            Some(m) => println!("{:<12} n={:<6} ROC {:.3} F1 {:.3}", r.cell, r.n_train, m.roc_auc, m.f1),
            None => println!("{:<12} n={:<6} invalid: {}", r.cell, r.n_train, r.invalid.as_deref().unwrap_or("")),
        }
    }
    Ok(())
}
