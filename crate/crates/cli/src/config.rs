use std::path::{Path, PathBuf};

use civiclink::analytics::AnalyticsConfig;
use civiclink::corpus::{SynthParams, DEFAULT_WINDOW_DAYS};
use civiclink::meetings::{CommentConfig, DEFAULT_LIKELIHOOD_THRESHOLD};
use civiclink::newsworthy::{NewsworthySynthParams, PromptConfig, SplitConfig};
use civiclink::prmlink::{ChainConfig, ExternalConfig};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkSettings {
    pub window_days: u32,
    /// Fixed threshold; calibrated on the training gold split when unset.
    pub lambda: Option<f64>,
    /// Also score every chain prefix and report its F1.
    pub ablate: bool,
}

impl Default for LinkSettings {
    fn default() -> Self {
        Self {
            window_days: DEFAULT_WINDOW_DAYS,
            lambda: None,
            ablate: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlignSettings {
    /// Share of fully timestamped meetings held out to score the transition model.
    pub held_out_fraction: f64,
    pub likelihood_threshold: f64,
    pub comments: CommentConfig,
}

impl Default for AlignSettings {
    fn default() -> Self {
        Self {
            held_out_fraction: 0.3,
            likelihood_threshold: DEFAULT_LIKELIHOOD_THRESHOLD,
            comments: CommentConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NewsworthySettings {
    pub split: SplitConfig,
    pub prompt: PromptConfig,
    /// Sections rendered for train/eval/rank, e.g. "full" or "1,2".
    pub sections: String,
    pub section_grid: Vec<String>,
    pub cutoff_years: Vec<i32>,
    pub synth: NewsworthySynthParams,
}

impl Default for NewsworthySettings {
    fn default() -> Self {
        Self {
            split: SplitConfig::default(),
            prompt: PromptConfig::default(),
            sections: "full".to_string(),
            section_grid: ["full", "1,2", "1", "2,3"].map(String::from).to_vec(),
            cutoff_years: (2017..=2021).collect(),
            synth: NewsworthySynthParams::default(),
        }
    }
}

/// Everything a run depends on. Loaded from TOML, then overridden by flags;
/// `seed` is copied into every seeded component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub jobs: Option<usize>,
    pub out: PathBuf,
    pub synth: SynthParams,
    pub chain: ChainConfig,
    pub link: LinkSettings,
    pub external: ExternalConfig,
    pub align: AlignSettings,
    pub newsworthy: NewsworthySettings,
    pub analytics: AnalyticsConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            jobs: None,
            out: PathBuf::from("out"),
            synth: SynthParams::default(),
            chain: ChainConfig::default(),
            link: LinkSettings::default(),
            external: ExternalConfig::default(),
            align: AlignSettings::default(),
            newsworthy: NewsworthySettings::default(),
            analytics: AnalyticsConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        if !path.exists() {
            return Err(CliError::MissingInput(path.to_path_buf()));
        }
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }

    /// Propagates the run seed and checks cross-field constraints.
    pub fn finalize(mut self) -> CliResult<Self> {
        let seed = self.seed;
        self.chain.seed = seed;
        self.chain.train.seed = seed;
        self.newsworthy.split.seed = seed;
        self.analytics.lda.seed = seed;
        if let Some(l) = self.link.lambda {
            if !(0.0..=1.0).contains(&l) {
                return Err(CliError::Usage(format!("lambda {l} outside [0, 1]")));
            }
        }
        if self.jobs == Some(0) {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        Ok(self)
    }
}
