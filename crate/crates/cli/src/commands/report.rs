use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde_json::Value;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::io::{create_out, read_json, require};
use crate::manifest::RunManifest;

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Output directories of earlier runs, searched for known result files.
    #[arg(long = "run", required = true)]
    pub runs: Vec<PathBuf>,
    /// Fail (exit 3) when the link test F1 is below this.
    #[arg(long)]
    pub min_link_f1: Option<f64>,
    /// Fail (exit 3) when the newsworthiness ROC-AUC is below this.
    #[arg(long)]
    pub min_roc: Option<f64>,
}

fn number(v: &Value, path: &[&str]) -> Option<f64> {
    path.iter().try_fold(v, |v, k| v.get(k)).and_then(Value::as_f64)
}

fn csv_section(doc: &mut String, title: &str, path: &Path) -> CliResult<()> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut lines = text.lines();
    let Some(header) = lines.next() else { return Ok(()) };
    let cols = header.split(',').count();
    let _ = writeln!(doc, "## {title}\n");
    let _ = writeln!(doc, "| {} |", header.replace(',', " | "));
    let _ = writeln!(doc, "|{}", " --- |".repeat(cols));
    for line in lines {
        let _ = writeln!(doc, "| {} |", line.replace(',', " | "));
    }
    doc.push('\n');
    Ok(())
}

pub fn run(args: ReportArgs, config: &mut RunConfig, command: Vec<String>) -> CliResult<()> {
    require(&args.runs.iter().map(PathBuf::as_path).collect::<Vec<_>>())?;
    let mut manifest = RunManifest::new(command, config.clone());
    manifest.stage("collect");

    let mut doc = String::from("# civiclink run report\n\n");
    let mut failures = Vec::new();
    let mut link_f1 = None;
    let mut roc = None;
    for dir in &args.runs {
        let eval = dir.join("eval.json");
        if eval.exists() {
            manifest.add_input(&eval)?;
            let v: Value = read_json(&eval)?;
            link_f1 = number(&v, &["test", "f1"]).or(link_f1);
            let _ = writeln!(doc, "## Links ({})\n", dir.display());
            let _ = writeln!(doc, "- threshold: {}", number(&v, &["lambda"]).unwrap_or(f64::NAN));
            let _ = writeln!(doc, "- links emitted: {}", v["n_links"]);
            for split in ["train", "test"] {
                if let Some(f1) = number(&v, &[split, "f1"]) {
                    let p = number(&v, &[split, "precision"]).unwrap_or(f64::NAN);
                    let r = number(&v, &[split, "recall"]).unwrap_or(f64::NAN);
                    let _ = writeln!(doc, "- {split}: F1 {f1:.3}, precision {p:.3}, recall {r:.3}");
                }
            }
            doc.push('\n');
        }
        let ablation = dir.join("ablation.json");
        if ablation.exists() {
            manifest.add_input(&ablation)?;
            let v: Value = read_json(&ablation)?;
            let _ = writeln!(doc, "## Chain ablation\n\n| steps | lambda | test F1 |\n| --- | --- | --- |");
            for row in v.as_array().into_iter().flatten() {
                let _ = writeln!(
                    doc,
                    "| {} | {:.4} | {:.3} |",
                    row["steps"],
                    number(row, &["lambda"]).unwrap_or(f64::NAN),
                    number(row, &["test", "f1"]).unwrap_or(f64::NAN)
                );
            }
            doc.push('\n');
        }
        let align = dir.join("align_report.json");
        if align.exists() {
            manifest.add_input(&align)?;
            let v: Value = read_json(&align)?;
            let _ = writeln!(doc, "## Alignment\n");
            let _ = writeln!(doc, "- meetings: {}, pegged items: {}", v["n_meetings"], v["n_pegged_items"]);
            if let Some(f1) = number(&v, &["transition_eval", "f1"]) {
                let _ = writeln!(doc, "- transition classifier held-out F1: {f1:.3}");
            }
            doc.push('\n');
        }
        let metrics = dir.join("metrics.json");
        if metrics.exists() {
            manifest.add_input(&metrics)?;
            let v: Value = read_json(&metrics)?;
            roc = number(&v, &["roc_auc"]).or(roc);
            let _ = writeln!(doc, "## Newsworthiness\n");
            for key in ["f1", "roc_auc", "recall_at_10", "mrr"] {
                let _ = writeln!(doc, "- {key}: {:.3}", number(&v, &[key]).unwrap_or(f64::NAN));
            }
            doc.push('\n');
        }
        for (file, title) in [
            ("sections_grid.csv", "Prompt section ablation"),
            ("cutoff_grid.csv", "Training cutoff ablation"),
            ("coverage_summary.csv", "Coverage"),
            ("discussion_comparison.csv", "Discussion by class"),
            ("topics.csv", "Topics by newsworthiness"),
        ] {
            let p = dir.join(file);
            if p.exists() {
                manifest.add_input(&p)?;
                csv_section(&mut doc, title, &p)?;
            }
        }
    }

    if let Some(min) = args.min_link_f1 {
        match link_f1 {
            Some(f) if f >= min => {}
            Some(f) => failures.push(format!("link test F1 {f:.3} < {min}")),
            None => failures.push("no link evaluation found".to_string()),
        }
    }
    if let Some(min) = args.min_roc {
        match roc {
            Some(r) if r >= min => {}
            Some(r) => failures.push(format!("ROC-AUC {r:.3} < {min}")),
            None => failures.push("no newsworthiness metrics found".to_string()),
        }
    }
    if !failures.is_empty() {
        let _ = writeln!(doc, "## Failed checks\n");
        for f in &failures {
            let _ = writeln!(doc, "- {f}");
        }
    }

    manifest.stage("write");
    create_out(&config.out)?;
    let path = config.out.join("report.md");
    fs::write(&path, &doc).map_err(|e| CliError::io(&path, e))?;
    manifest.finish(&config.out)?;
    println!("wrote {}", path.display());
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(failures.join("; ")))
    }
}
