use std::path::Path;

use chrono::{Datelike, NaiveDate};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::features::NewsworthyExample;
use super::metrics::{eval_ranker, RankMetrics};
use super::prompt::{assemble_prompt, PromptConfig, PromptRecord, PromptSections};
use super::ranker::train_ranker;
use super::split::{balance, temporal_split, SplitConfig};
use crate::error::{Error, Result};
use crate::learn::TrainConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct GridSettings {
    pub split: SplitConfig,
    pub prompt: PromptConfig,
    pub train: TrainConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub cell: String,
    pub n_train: usize,
    pub n_train_positive: usize,
    pub n_test: usize,
    pub metrics: Option<RankMetrics>,
    /// Why the cell has no metrics.
    pub invalid: Option<String>,
}

fn prompts(examples: &[NewsworthyExample], sections: PromptSections, config: PromptConfig) -> Vec<PromptRecord> {
    examples.iter().map(|e| assemble_prompt(e, sections, config)).collect()
}

fn run_cell(
    cell: String,
    train: &[NewsworthyExample],
    test: &[NewsworthyExample],
    sections: PromptSections,
    settings: &GridSettings,
) -> GridRow {
    let n_train_positive = train.iter().filter(|e| e.label).count();
    let outcome = train_ranker(&prompts(train, sections, settings.prompt), settings.train)
        .and_then(|m| eval_ranker(&m, &prompts(test, sections, settings.prompt)));
    let (metrics, invalid) = match outcome {
        Ok(m) => (Some(m), None),
        Err(e) => (None, Some(e.to_string())),
    };
    GridRow {
        cell,
        n_train: train.len(),
        n_train_positive,
        n_test: test.len(),
        metrics,
        invalid,
    }
}

/// One row per prompt-section configuration, all on the same split.
pub fn run_section_grid(
    examples: &[NewsworthyExample],
    grid: &[PromptSections],
    settings: &GridSettings,
) -> Result<Vec<GridRow>> {
    let (train, test) = temporal_split(examples, &settings.split)?;
    Ok(grid
        .par_iter()
        .map(|&s| run_cell(s.to_string(), &train, &test, s, settings))
        .collect())
}

/// One row per training cutoff year: train on everything dated before
/// January 1 of that year, test on the fixed set at or after the main cutoff.
pub fn run_cutoff_grid(
    examples: &[NewsworthyExample],
    years: &[i32],
    settings: &GridSettings,
) -> Result<Vec<GridRow>> {
    let test: Vec<NewsworthyExample> = examples
        .iter()
        .filter(|e| e.meeting_date >= settings.split.cutoff)
        .cloned()
        .collect();
    if test.is_empty() {
        return Err(Error::EmptySplit("test"));
    }
    let first_year = examples.iter().map(|e| e.meeting_date.year()).min().unwrap_or_default();
    let mut rows: Vec<GridRow> = years
        .par_iter()
        .map(|&y| {
            let cutoff = NaiveDate::from_ymd_opt(y, 1, 1).expect("valid year");
            let cell = format!("'{:02}-'{:02}", first_year.rem_euclid(100), (y - 1).rem_euclid(100));
            if cutoff > settings.split.cutoff {
                return GridRow {
                    cell,
                    n_train: 0,
                    n_train_positive: 0,
                    n_test: test.len(),
                    metrics: None,
                    invalid: Some("training cutoff overlaps the test period".into()),
                };
            }
            let train: Vec<NewsworthyExample> =
                examples.iter().filter(|e| e.meeting_date < cutoff).cloned().collect();
            let train = if settings.split.balance_train {
                balance(train, settings.split.seed)
            } else {
                train
            };
            run_cell(cell, &train, &test, PromptSections::FULL, settings)
        })
        .collect();
    rows.sort_by_key(|r| r.cell.clone());
    Ok(rows)
}

pub fn write_grid_csv(rows: &[GridRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["cell", "n_train", "n_train_positive", "n_test", "f1", "roc_auc", "recall_at_10", "mrr", "invalid"])?;
    for r in rows {
        let m = |f: fn(&RankMetrics) -> f64| r.metrics.as_ref().map(|m| f(m).to_string()).unwrap_or_default();
        w.write_record([
            r.cell.clone(),
            r.n_train.to_string(),
            r.n_train_positive.to_string(),
            r.n_test.to_string(),
            m(|x| x.f1),
            m(|x| x.roc_auc),
            m(|x| x.recall_at_10),
            m(|x| x.mrr),
            r.invalid.clone().unwrap_or_default(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
