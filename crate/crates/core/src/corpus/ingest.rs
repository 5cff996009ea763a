use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::schema::{normalize_body, Annotation, Article, GoldPair, Meeting, PolicyItem};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordKind {
    Article,
    Policy,
    Meeting,
    Gold,
    Annotation,
}

impl std::str::FromStr for RecordKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "article" | "articles" => Ok(Self::Article),
            "policy" | "policies" => Ok(Self::Policy),
            "meeting" | "meetings" => Ok(Self::Meeting),
            "gold" => Ok(Self::Gold),
            "annotation" | "annotations" => Ok(Self::Annotation),
            other => Err(Error::invalid(format!("unknown record kind {other:?}"))),
        }
    }
}

/// A JSONL-ingestible corpus record.
pub trait Record: DeserializeOwned + Serialize {
    const KIND: RecordKind;

    /// Checks invariants, normalizing where the fix is unambiguous
    /// (e.g. sorting transcript segments). `Err` carries the reason.
    fn validate(&mut self) -> std::result::Result<(), String>;

    /// Two records with equal keys are duplicates; the first one wins.
    fn dedup_keys(&self) -> Vec<String>;
}

impl Record for Article {
    const KIND: RecordKind = RecordKind::Article;

    fn validate(&mut self) -> std::result::Result<(), String> {
        if self.id.trim().is_empty() {
            return Err("empty id".into());
        }
        if normalize_body(&self.body).is_empty() {
            return Err("body empty after normalization".into());
        }
        Ok(())
    }

    fn dedup_keys(&self) -> Vec<String> {
        vec![format!("id:{}", self.id), format!("hash:{:016x}", self.dedup_hash)]
    }
}

impl Record for PolicyItem {
    const KIND: RecordKind = RecordKind::Policy;

    fn validate(&mut self) -> std::result::Result<(), String> {
        if self.id.trim().is_empty() {
            return Err("empty id".into());
        }
        if self.description.trim().is_empty() {
            return Err("empty description".into());
        }
        Ok(())
    }

    fn dedup_keys(&self) -> Vec<String> {
        vec![self.id.clone()]
    }
}

impl Record for Meeting {
    const KIND: RecordKind = RecordKind::Meeting;

    fn validate(&mut self) -> std::result::Result<(), String> {
        if self.id.trim().is_empty() {
            return Err("empty id".into());
        }
        for s in &self.segments {
            if s.speaker_id.trim().is_empty() {
                return Err("segment with empty speaker_id".into());
            }
            if !(s.t_start >= 0.0 && s.t_start < s.t_end && s.t_end.is_finite()) {
                return Err(format!("bad segment times [{}, {}]", s.t_start, s.t_end));
            }
        }
        self.segments.sort_by(|a, b| a.t_start.total_cmp(&b.t_start));
        let duration = self.duration();
        for item in &self.agenda {
            if let Some(ts) = item.timestamp_s {
                let upper = if self.segments.is_empty() { f64::INFINITY } else { duration };
                if !(ts >= 0.0 && ts <= upper) {
                    return Err(format!("agenda timestamp {ts} outside [0, {duration}]"));
                }
            }
        }
        Ok(())
    }

    fn dedup_keys(&self) -> Vec<String> {
        vec![self.id.clone()]
    }
}

impl Record for GoldPair {
    const KIND: RecordKind = RecordKind::Gold;

    fn validate(&mut self) -> std::result::Result<(), String> {
        if self.article_id.is_empty() || self.policy_id.is_empty() {
            return Err("empty id".into());
        }
        Ok(())
    }

    fn dedup_keys(&self) -> Vec<String> {
        vec![format!("{}\u{1f}{}", self.article_id, self.policy_id)]
    }
}

impl Record for Annotation {
    const KIND: RecordKind = RecordKind::Annotation;

    fn validate(&mut self) -> std::result::Result<(), String> {
        if self.article_id.is_empty() {
            return Err("empty article_id".into());
        }
        Ok(())
    }

    fn dedup_keys(&self) -> Vec<String> {
        vec![self.article_id.clone()]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvalidLine {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub kind: RecordKind,
    /// Non-blank lines seen.
    pub read: usize,
    pub kept: usize,
    pub dropped_dup: usize,
    pub dropped_invalid: usize,
    pub invalid_lines: Vec<InvalidLine>,
}

impl IngestReport {
    fn new(kind: RecordKind) -> Self {
        Self {
            kind,
            read: 0,
            kept: 0,
            dropped_dup: 0,
            dropped_invalid: 0,
            invalid_lines: Vec::new(),
        }
    }
}

/// Reads a JSONL file of `T`. Malformed or invalid lines are skipped and
/// counted; only an unreadable file is an error.
pub fn ingest<T: Record>(path: impl AsRef<Path>) -> Result<(Vec<T>, IngestReport)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    ingest_reader(BufReader::new(file)).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

pub fn ingest_reader<T: Record, R: Read>(reader: R) -> Result<(Vec<T>, IngestReport)> {
    let mut report = IngestReport::new(T::KIND);
    let mut seen: HashSet<String> = HashSet::new();
    let mut out = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|e| Error::io("<reader>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        report.read += 1;
        let parsed: std::result::Result<T, String> = serde_json::from_str::<T>(&line)
            .map_err(|e| e.to_string())
            .and_then(|mut r| r.validate().map(|_| r));
        match parsed {
            Ok(rec) => {
                let keys = rec.dedup_keys();
                if keys.iter().any(|k| seen.contains(k)) {
                    report.dropped_dup += 1;
                } else {
                    seen.extend(keys);
                    out.push(rec);
                    report.kept += 1;
                }
            }
            Err(reason) => {
                report.dropped_invalid += 1;
                report.invalid_lines.push(InvalidLine { line: i + 1, reason });
            }
        }
    }
    Ok((out, report))
}

/// Strict reader for files this tool wrote itself: any bad line is an error.
pub fn read_jsonl<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<Vec<T>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line)
                .map_err(|e| Error::invalid(format!("{}:{}: {e}", path.display(), i + 1)))?,
        );
    }
    Ok(out)
}

pub fn write_jsonl<T: Serialize>(records: &[T], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn article_line(id: &str, body: &str) -> String {
        format!(r#"{{"id":"{id}","url":"https://n/{id}","publish_date":"2020-02-03","title":"t","body":"{body}"}}"#)
    }

    #[test]
    fn identical_bodies_deduplicated() {
        let data = [article_line("a", "Same body."), article_line("b", "Same body.")].join("\n");
        let (arts, rep) = ingest_reader::<Article, _>(data.as_bytes()).unwrap();
        assert_eq!(arts.len(), 1);
        assert_eq!((rep.kept, rep.dropped_dup), (1, 1));
    }

    #[test]
    fn empty_input_is_fine() {
        let (arts, rep) = ingest_reader::<Article, _>("".as_bytes()).unwrap();
        assert!(arts.is_empty());
        assert_eq!(rep.kept, 0);
        assert_eq!(rep.read, 0);
    }

    #[test]
    fn malformed_line_skipped_not_fatal() {
        let mut lines: Vec<String> = (0..5).map(|i| article_line(&format!("a{i}"), &format!("body number {i}"))).collect();
        lines.insert(2, "{not json".to_string());
        let (arts, rep) = ingest_reader::<Article, _>(lines.join("\n").as_bytes()).unwrap();
        assert_eq!(arts.len(), 5);
        assert_eq!(rep.read, 6);
        assert_eq!(rep.kept, 5);
        assert_eq!(rep.dropped_invalid, 1);
        assert_eq!(rep.invalid_lines[0].line, 3);
    }

    #[test]
    fn punctuation_only_body_is_invalid() {
        let (_, rep) = ingest_reader::<Article, _>(article_line("a", "?!...").as_bytes()).unwrap();
        assert_eq!(rep.dropped_invalid, 1);
    }

    #[test]
    fn meeting_segments_sorted_and_checked() {
        let good = r#"{"id":"m","date":"2020-01-01","agenda":[{"section_header":"ROLL CALL","timestamp_s":1.0}],"segments":[{"speaker_id":"S1","t_start":5,"t_end":9,"text":"b"},{"speaker_id":"S0","t_start":0,"t_end":4,"text":"a"}]}"#;
        let bad = r#"{"id":"n","date":"2020-01-01","segments":[{"speaker_id":"S1","t_start":5,"t_end":5,"text":"b"}]}"#;
        let late = r#"{"id":"o","date":"2020-01-01","agenda":[{"section_header":"X","timestamp_s":99.0}],"segments":[{"speaker_id":"S1","t_start":0,"t_end":5,"text":"b"}]}"#;
        let data = [good, bad, late].join("\n");
        let (ms, rep) = ingest_reader::<Meeting, _>(data.as_bytes()).unwrap();
        assert_eq!(rep.kept, 1);
        assert_eq!(rep.dropped_invalid, 2);
        assert_eq!(ms[0].segments[0].speaker_id, "S0");
    }

    #[test]
    fn missing_file_is_an_error() {
        assert!(matches!(ingest::<Article>("/definitely/not/here.jsonl"), Err(Error::Io { .. })));
    }

    #[test]
    fn ingest_is_idempotent() {
        let dir = tempfile::tempdir().unwrap();
        let src = dir.path().join("a.jsonl");
        let lines = [
            article_line("a", "one"),
            article_line("b", "One!"),
            "garbage".to_string(),
            article_line("c", "two"),
        ];
        std::fs::write(&src, lines.join("\n")).unwrap();
        let (first, _) = ingest::<Article>(&src).unwrap();
        let out = dir.path().join("b.jsonl");
        write_jsonl(&first, &out).unwrap();
        let (second, rep) = ingest::<Article>(&out).unwrap();
        assert_eq!(first, second);
        assert_eq!((rep.dropped_dup, rep.dropped_invalid), (0, 0));
    }
}
