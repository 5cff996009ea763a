use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::corpus::Article;
use crate::error::{Error, Result};
use crate::util::hash64;

pub const ENDPOINT_VAR: &str = "CIVICLINK_LLM_ENDPOINT";
pub const API_KEY_VAR: &str = "CIVICLINK_LLM_API_KEY";
pub const MODEL_VAR: &str = "CIVICLINK_LLM_MODEL";

pub const EXEMPLAR_SLOTS: usize = 10;

/// Probability assigned when only a sampled answer is available.
const TEXT_YES: f64 = 0.9;
const TEXT_NO: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exemplar {
    pub text: String,
    pub answer: bool,
}

/// Few-shot yes/no prompt. Slots left empty are rendered as nothing; the
/// operator is expected to fill them with labelled articles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PromptTemplate {
    pub instructions: String,
    pub question: String,
    pub exemplars: Vec<Exemplar>,
    /// Article bodies are cut to this many words.
    pub max_words: usize,
}

impl Default for PromptTemplate {
    fn default() -> Self {
        Self {
            instructions: "Decide whether each news article reports on a vote taken by the San Francisco Board \
                           of Supervisors within the month before the article was published."
                .to_string(),
            question: "Does this article cover a recent vote by the San Francisco Board of Supervisors? Answer \"yes\" or \"no\"."
                .to_string(),
            exemplars: Vec::new(),
            max_words: 300,
        }
    }
}

impl PromptTemplate {
    pub fn validate(&self) -> Result<()> {
        if self.exemplars.len() > EXEMPLAR_SLOTS {
            return Err(Error::Config(format!(
                "prompt template has {} exemplars; at most {EXEMPLAR_SLOTS} slots",
                self.exemplars.len()
            )));
        }
        Ok(())
    }

    fn block(&self, date: &str, title: &str, body: &str) -> String {
        let words: Vec<&str> = body.split_whitespace().take(self.max_words).collect();
        format!("Published: {date}\nTitle: {title}\nArticle: {}\n{}\nAnswer:", words.join(" "), self.question)
    }

    pub fn render(&self, article: &Article) -> String {
        let mut out = format!("{}\n\n", self.instructions);
        for ex in &self.exemplars {
            out.push_str(&self.block("", "", &ex.text));
            out.push_str(if ex.answer { " yes\n\n" } else { " no\n\n" });
        }
        out.push_str(&self.block(&article.publish_date.to_string(), &article.title, &article.body));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExternalConfig {
    /// `None` selects the deterministic stub.
    pub endpoint: Option<String>,
    #[serde(skip_serializing)]
    pub api_key: Option<String>,
    pub model: String,
    pub timeout_s: u64,
    /// Minimum spacing between outgoing requests.
    pub min_interval_ms: u64,
    pub cache_path: Option<PathBuf>,
    pub template: PromptTemplate,
}

impl Default for ExternalConfig {
    fn default() -> Self {
        Self {
            endpoint: None,
            api_key: None,
            model: "gpt-3.5-turbo-instruct".to_string(),
            timeout_s: 30,
            min_interval_ms: 200,
            cache_path: None,
            template: PromptTemplate::default(),
        }
    }
}

impl ExternalConfig {
    /// Overrides endpoint, key and model from the environment when set.
    pub fn with_env(mut self) -> Self {
        if let Ok(v) = std::env::var(ENDPOINT_VAR) {
            self.endpoint = Some(v).filter(|s| !s.is_empty());
        }
        if let Ok(v) = std::env::var(API_KEY_VAR) {
            self.api_key = Some(v);
        }
        if let Ok(v) = std::env::var(MODEL_VAR) {
            self.model = v;
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CachedAnswer {
    pub prob: f64,
    /// Raw log-probabilities as reported, before renormalization.
    pub yes_logprob: Option<f64>,
    pub no_logprob: Option<f64>,
}

enum Mode {
    Stub,
    Http { agent: ureq::Agent, endpoint: String },
}

/// Yes/no probability from a completions-style endpoint, or from a
/// deterministic hash of the prompt in stub mode.
pub struct ExternalYesNoClient {
    mode: Mode,
    config: ExternalConfig,
    cache: RwLock<BTreeMap<String, CachedAnswer>>,
    last_request: Mutex<Option<Instant>>,
}

impl std::fmt::Debug for ExternalYesNoClient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExternalYesNoClient")
            .field("stub", &self.is_stub())
            .field("cached", &self.cache.read().map(|c| c.len()).unwrap_or(0))
            .finish()
    }
}

impl ExternalYesNoClient {
    pub fn new(config: ExternalConfig) -> Result<Self> {
        config.template.validate()?;
        let mode = match &config.endpoint {
            None => Mode::Stub,
            Some(endpoint) => {
                let agent: ureq::Agent = ureq::Agent::config_builder()
                    .timeout_global(Some(Duration::from_secs(config.timeout_s)))
                    .build()
                    .into();
                Mode::Http {
                    agent,
                    endpoint: endpoint.clone(),
                }
            }
        };
        let cache = match &config.cache_path {
            Some(p) if p.exists() => load_cache(p)?,
            _ => BTreeMap::new(),
        };
        Ok(Self {
            mode,
            config,
            cache: RwLock::new(cache),
            last_request: Mutex::new(None),
        })
    }

    pub fn stub() -> Self {
        Self::new(ExternalConfig::default()).expect("default template is valid")
    }

    pub fn is_stub(&self) -> bool {
        matches!(self.mode, Mode::Stub)
    }

    pub fn cache_key(prompt: &str) -> String {
        format!("{:016x}", hash64(prompt.as_bytes()))
    }

    pub fn probability(&self, article: &Article) -> Result<f64> {
        self.answer(&self.config.template.render(article)).map(|a| a.prob)
    }

    pub fn answer(&self, prompt: &str) -> Result<CachedAnswer> {
        let key = Self::cache_key(prompt);
        if let Some(hit) = self.cache.read().map_err(|_| poisoned())?.get(&key) {
            return Ok(*hit);
        }
        let answer = match &self.mode {
            Mode::Stub => CachedAnswer {
                prob: (hash64(prompt.as_bytes()) % 1_000_000) as f64 / 1_000_000.0,
                yes_logprob: None,
                no_logprob: None,
            },
            Mode::Http { agent, endpoint } => {
                self.throttle()?;
                self.request(agent, endpoint, prompt)?
            }
        };
        self.cache.write().map_err(|_| poisoned())?.insert(key, answer);
        Ok(answer)
    }

    fn throttle(&self) -> Result<()> {
        let mut last = self.last_request.lock().map_err(|_| poisoned())?;
        let gap = Duration::from_millis(self.config.min_interval_ms);
        if let Some(t) = *last {
            let since = t.elapsed();
            if since < gap {
                std::thread::sleep(gap - since);
            }
        }
        *last = Some(Instant::now());
        Ok(())
    }

    fn request(&self, agent: &ureq::Agent, endpoint: &str, prompt: &str) -> Result<CachedAnswer> {
        let body = json!({
            "model": self.config.model,
            "prompt": prompt,
            "max_tokens": 1,
            "temperature": 0,
            "logprobs": 5,
        });
        let mut req = agent.post(endpoint);
        if let Some(key) = &self.config.api_key {
            req = req.header("Authorization", &format!("Bearer {key}"));
        }
        let mut resp = req.send_json(&body).map_err(|e| Error::External(e.to_string()))?;
        let value: Value = resp.body_mut().read_json().map_err(|e| Error::External(e.to_string()))?;
        parse_completion(&value)
    }

    pub fn save_cache(&self) -> Result<()> {
        let Some(path) = &self.config.cache_path else {
            return Ok(());
        };
        let cache = self.cache.read().map_err(|_| poisoned())?;
        let text = serde_json::to_string_pretty(&*cache)?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

fn poisoned() -> Error {
    Error::External("client lock poisoned".to_string())
}

fn load_cache(path: &Path) -> Result<BTreeMap<String, CachedAnswer>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

/// Reads `choices[0].logprobs.top_logprobs[0]` when present, renormalizing
/// over the yes/no tokens; otherwise maps the sampled text.
pub fn parse_completion(value: &Value) -> Result<CachedAnswer> {
    let choice = value
        .get("choices")
        .and_then(|c| c.get(0))
        .ok_or_else(|| Error::External("response has no choices".to_string()))?;
    let top = choice
        .get("logprobs")
        .and_then(|l| l.get("top_logprobs"))
        .and_then(|t| t.get(0))
        .and_then(Value::as_object);
    if let Some(top) = top {
        let mut yes: Option<f64> = None;
        let mut no: Option<f64> = None;
        for (tok, lp) in top {
            let Some(lp) = lp.as_f64() else { continue };
            let slot = match tok.trim().to_lowercase().as_str() {
                "yes" => &mut yes,
                "no" => &mut no,
                _ => continue,
            };
            *slot = Some(slot.map_or(lp, |prev: f64| log_add(prev, lp)));
        }
        if yes.is_some() || no.is_some() {
            let y = yes.unwrap_or(f64::NEG_INFINITY);
            let n = no.unwrap_or(f64::NEG_INFINITY);
            let m = y.max(n);
            let prob = (y - m).exp() / ((y - m).exp() + (n - m).exp());
            return Ok(CachedAnswer {
                prob,
                yes_logprob: yes,
                no_logprob: no,
            });
        }
    }
    let text = choice
        .get("text")
        .and_then(Value::as_str)
        .map(|t| t.trim().to_lowercase())
        .unwrap_or_default();
    let prob = if text.starts_with("yes") {
        TEXT_YES
    } else if text.starts_with("no") {
        TEXT_NO
    } else {
        return Err(Error::External(format!("unrecognised answer {text:?}")));
    };
    Ok(CachedAnswer {
        prob,
        yes_logprob: None,
        no_logprob: None,
    })
}

fn log_add(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}
