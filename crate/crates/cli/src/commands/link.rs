use std::path::PathBuf;
use std::sync::Arc;

use clap::Args;
use serde::Serialize;

use civiclink::corpus::{candidate_pairs, Split};
use civiclink::learn::EvalReport;
use civiclink::prmlink::{
    ablate_chain, build_standard_chain, calibrate_lambda, emit_links, evaluate_links, evaluation_universe,
    gold_pairs, run_funnel, write_links_csv, write_scores_csv, ExternalYesNoClient, LambdaCalibration,
    RecentVoteScorer, SimilarityTarget,
};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::io::{create_out, load_annotations, load_corpus, load_gold, require, write_json, CorpusPaths, GOLD};
use crate::manifest::RunManifest;

#[derive(Debug, Args)]
pub struct LinkArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Calibrate the threshold on the training gold split.
    #[arg(long, conflicts_with = "lambda")]
    pub calibrate: bool,
    /// Fixed link threshold.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub window_days: Option<u32>,
    /// Score every chain prefix and write ablation.json.
    #[arg(long)]
    pub ablate: bool,
    /// Use the external yes/no client for the recent-vote step.
    #[arg(long)]
    pub external: bool,
    /// Compare against meeting minutes instead of policy text.
    #[arg(long)]
    pub minutes: bool,
}

#[derive(Debug, Serialize)]
struct AblationRow {
    steps: usize,
    lambda: f64,
    train_f1: f64,
    test: EvalReport,
}

#[derive(Debug, Serialize)]
struct LinkEval {
    lambda: f64,
    calibrated: bool,
    n_candidates: usize,
    n_links: usize,
    train: Option<EvalReport>,
    test: Option<EvalReport>,
}

pub fn run(args: LinkArgs, config: &mut RunConfig, command: Vec<String>) -> CliResult<()> {
    if args.calibrate {
        config.link.lambda = None;
    }
    if args.lambda.is_some() {
        config.link.lambda = args.lambda;
    }
    if let Some(w) = args.window_days {
        config.link.window_days = w;
    }
    config.link.ablate |= args.ablate;
    if args.external {
        config.chain.recent_scorer = RecentVoteScorer::External;
    }
    if args.minutes {
        config.chain.target = SimilarityTarget::Minutes;
    }
    *config = config.clone().finalize()?;

    let paths = CorpusPaths::new(&args.corpus);
    let files = paths.core_files();
    let gold_path = paths.file(GOLD);
    let needs_gold = config.link.lambda.is_none() || config.link.ablate;
    let mut required: Vec<&std::path::Path> = files.iter().map(|p| p.as_path()).collect();
    if needs_gold {
        required.push(&gold_path);
    }
    require(&required)?;

    let mut manifest = RunManifest::new(command, config.clone());
    for f in &files {
        manifest.add_input(f)?;
    }
    if gold_path.exists() {
        manifest.add_input(&gold_path)?;
    }
    manifest.stage("load");
    let store = load_corpus(&paths, None)?.store;
    let gold = if gold_path.exists() { load_gold(&paths)? } else { Vec::new() };
    let annotations = load_annotations(&paths)?;
    if needs_gold && gold.iter().all(|g| g.split != Split::Train) {
        return Err(CliError::Data(civiclink::Error::EmptySplit("gold train")));
    }

    manifest.stage("candidates");
    let pairs = candidate_pairs(store.articles(), store.policies(), &store.meeting_dates(), config.link.window_days)?;

    manifest.stage("train_chain");
    let external = match config.chain.recent_scorer {
        RecentVoteScorer::External => Some(Arc::new(ExternalYesNoClient::new(config.external.clone().with_env())?)),
        RecentVoteScorer::Rule => None,
    };
    let trained = build_standard_chain(&store, &annotations, &config.chain, external.clone())?;

    manifest.stage("score");
    let scores = run_funnel(&trained.chain, &store, &pairs)?;

    manifest.stage("calibrate");
    let train_gold = gold_pairs(&gold, Split::Train);
    let test_gold = gold_pairs(&gold, Split::Test);
    let (lambda, calibration): (f64, Option<LambdaCalibration>) = match config.link.lambda {
        Some(l) => (l, None),
        None => {
            let c = calibrate_lambda(&evaluation_universe(&scores, &gold, Split::Train), &train_gold)?;
            (c.lambda, Some(c))
        }
    };
    let links = emit_links(&scores, lambda);
    let evaluate = |split: Split, set| -> CliResult<Option<EvalReport>> {
        if gold.iter().all(|g| g.split != split) {
            return Ok(None);
        }
        Ok(Some(evaluate_links(&evaluation_universe(&scores, &gold, split), set, lambda)?))
    };
    let eval = LinkEval {
        lambda,
        calibrated: calibration.is_some(),
        n_candidates: pairs.len(),
        n_links: links.len(),
        train: evaluate(Split::Train, &train_gold)?,
        test: evaluate(Split::Test, &test_gold)?,
    };

    let ablation = if config.link.ablate {
        manifest.stage("ablate");
        let mut rows = Vec::new();
        for k in 0..=trained.chain.steps().len() {
            let chain = ablate_chain(&trained.chain, k)?;
            let s = run_funnel(&chain, &store, &pairs)?;
            let c = calibrate_lambda(&evaluation_universe(&s, &gold, Split::Train), &train_gold)?;
            let test = evaluate_links(&evaluation_universe(&s, &gold, Split::Test), &test_gold, c.lambda)?;
            rows.push(AblationRow {
                steps: k,
                lambda: c.lambda,
                train_f1: c.train_f1,
                test,
            });
        }
        Some(rows)
    } else {
        None
    };

    manifest.stage("write");
    let out = &config.out;
    create_out(out)?;
    write_links_csv(&links, out.join("links.csv"))?;
    write_scores_csv(&scores, &trained.chain.step_names(), out.join("scores.csv"))?;
    if let Some(c) = &calibration {
        write_json(c, &out.join("calibration.json"))?;
    }
    write_json(&eval, &out.join("eval.json"))?;
    write_json(&trained.report, &out.join("chain_report.json"))?;
    if let Some(rows) = &ablation {
        write_json(rows, &out.join("ablation.json"))?;
    }
    if let Some(client) = &external {
        client.save_cache()?;
    }
    manifest.finish(out)?;

    println!("{} candidates, {} links at lambda {:.4}", eval.n_candidates, eval.n_links, lambda);
    if let Some(t) = &eval.test {
        println!("test F1 {:.3} precision {:.3} recall {:.3}", t.f1, t.precision, t.recall);
    }
    if let Some(rows) = &ablation {
        for r in rows {
            println!("steps {} test F1 {:.3}", r.steps, r.test.f1);
        }
    }
    Ok(())
}
