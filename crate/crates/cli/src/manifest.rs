use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

pub const MANIFEST_FILE: &str = "run_manifest.json";

#[derive(Debug, Clone, Serialize)]
pub struct FileDigest {
    pub path: PathBuf,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

/// Provenance of one invocation. Timings vary between runs; every other
/// field is a pure function of the command, config and inputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Vec<String>,
    pub config: RunConfig,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub timings: Vec<StageTiming>,
    #[serde(skip)]
    clock: Option<(String, Instant)>,
}

pub fn sha256_file(path: &Path) -> CliResult<(u64, String)> {
    let mut file = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 1 << 16];
    let mut total = 0u64;
    loop {
        let n = file.read(&mut buf).map_err(|e| CliError::io(path, e))?;
        if n == 0 {
            break;
        }
        total += n as u64;
        hasher.update(&buf[..n]);
    }
    let hex = hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();
    Ok((total, hex))
}

/// Files under `path` (or `path` itself), sorted.
fn files_under(path: &Path) -> CliResult<Vec<PathBuf>> {
    if path.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut out = Vec::new();
    let entries = fs::read_dir(path).map_err(|e| CliError::io(path, e))?;
    for entry in entries {
        let p = entry.map_err(|e| CliError::io(path, e))?.path();
        if p.is_dir() {
            out.extend(files_under(&p)?);
        } else {
            out.push(p);
        }
    }
    out.sort();
    Ok(out)
}

impl RunManifest {
    pub fn new(command: Vec<String>, config: RunConfig) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            inputs: Vec::new(),
            outputs: Vec::new(),
            timings: Vec::new(),
            clock: None,
        }
    }

    pub fn add_input(&mut self, path: &Path) -> CliResult<()> {
        for f in files_under(path)? {
            let (bytes, sha256) = sha256_file(&f)?;
            self.inputs.push(FileDigest { path: f, bytes, sha256 });
        }
        Ok(())
    }

    /// Ends the running stage, if any, and starts timing `name`.
    pub fn stage(&mut self, name: &str) {
        self.end_stage();
        log::info!("stage {name}");
        self.clock = Some((name.to_string(), Instant::now()));
    }

    fn end_stage(&mut self) {
        if let Some((stage, start)) = self.clock.take() {
            self.timings.push(StageTiming {
                stage,
                seconds: start.elapsed().as_secs_f64(),
            });
        }
    }

    /// Digests every file written under `out_dir` and writes the manifest there.
    pub fn finish(mut self, out_dir: &Path) -> CliResult<PathBuf> {
        self.end_stage();
        let target = out_dir.join(MANIFEST_FILE);
        for f in files_under(out_dir)? {
            if f == target {
                continue;
            }
            let (bytes, sha256) = sha256_file(&f)?;
            let rel = f.strip_prefix(out_dir).unwrap_or(&f).to_path_buf();
            self.outputs.push(FileDigest { path: rel, bytes, sha256 });
        }
        let text = serde_json::to_string_pretty(&self)?;
        fs::write(&target, text + "\n").map_err(|e| CliError::io(&target, e))?;
        Ok(target)
    }
}
