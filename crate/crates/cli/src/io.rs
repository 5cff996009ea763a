use std::fs;
use std::path::{Path, PathBuf};

use civiclink::corpus::{
    ingest, read_jsonl, Annotation, Article, CorpusStore, GoldPair, IngestReport, Meeting, PolicyItem,
};
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub const ARTICLES: &str = "articles.jsonl";
pub const POLICIES: &str = "policies.jsonl";
pub const MEETINGS: &str = "meetings.jsonl";
pub const GOLD: &str = "gold.jsonl";
pub const ANNOTATIONS: &str = "annotations.jsonl";

/// Fails on the first missing path. Call before creating any output.
pub fn require(paths: &[&Path]) -> CliResult<()> {
    match paths.iter().find(|p| !p.exists()) {
        Some(p) => Err(CliError::MissingInput(p.to_path_buf())),
        None => Ok(()),
    }
}

pub fn create_out(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

pub struct CorpusPaths {
    pub dir: PathBuf,
}

impl CorpusPaths {
    pub fn new(dir: &Path) -> Self {
        Self { dir: dir.to_path_buf() }
    }

    pub fn file(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// The three record files every corpus needs.
    pub fn core_files(&self) -> [PathBuf; 3] {
        [self.file(ARTICLES), self.file(POLICIES), self.file(MEETINGS)]
    }
}

pub struct LoadedCorpus {
    pub store: CorpusStore,
    pub reports: Vec<IngestReport>,
}

/// Ingests the core record files, with `meetings` replacing the corpus
/// meeting file when given.
pub fn load_corpus(paths: &CorpusPaths, meetings: Option<&Path>) -> CliResult<LoadedCorpus> {
    let (articles, ra) = ingest::<Article>(paths.file(ARTICLES))?;
    let (policies, rp) = ingest::<PolicyItem>(paths.file(POLICIES))?;
    let meeting_path = meetings.map_or_else(|| paths.file(MEETINGS), Path::to_path_buf);
    let (meetings, rm) = ingest::<Meeting>(meeting_path)?;
    Ok(LoadedCorpus {
        store: CorpusStore::new(articles, policies, meetings)?,
        reports: vec![ra, rp, rm],
    })
}

pub fn load_gold(paths: &CorpusPaths) -> CliResult<Vec<GoldPair>> {
    Ok(read_jsonl(paths.file(GOLD))?)
}

pub fn load_annotations(paths: &CorpusPaths) -> CliResult<Vec<Annotation>> {
    let p = paths.file(ANNOTATIONS);
    if p.exists() {
        Ok(read_jsonl(p)?)
    } else {
        Ok(Vec::new())
    }
}
