use std::path::Path;

use serde::{Deserialize, Serialize};

use super::chain::LinkScore;
use crate::error::{Error, Result};

/// Predicted links, many-to-many, best first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkSet {
    pub lambda: f64,
    pub links: Vec<LinkScore>,
}

impl LinkSet {
    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.links.iter().map(|l| l.key())
    }
}

pub fn emit_links(scores: &[LinkScore], lambda: f64) -> LinkSet {
    let mut links: Vec<LinkScore> = scores.iter().filter(|s| s.predicted_at(lambda)).cloned().collect();
    links.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.article_id.cmp(&b.article_id))
            .then_with(|| a.policy_id.cmp(&b.policy_id))
    });
    LinkSet { lambda, links }
}

/// One row per score: ids, combined score, similarity, one column per
/// step (blank when the step did not run), pruning step and degraded flag.
pub fn write_scores_csv(scores: &[LinkScore], step_names: &[String], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    let mut header = vec!["article_id".to_string(), "policy_id".into(), "score".into(), "similarity".into()];
    header.extend(step_names.iter().cloned());
    header.extend(["pruned_at".to_string(), "degraded".into()]);
    w.write_record(&header)?;
    for s in scores {
        let mut row = vec![
            s.article_id.clone(),
            s.policy_id.clone(),
            s.score.to_string(),
            s.similarity.map(|v| v.to_string()).unwrap_or_default(),
        ];
        for name in step_names {
            let v = s.step_probs.iter().find(|(n, _)| n == name).map(|(_, p)| p.to_string());
            row.push(v.unwrap_or_default());
        }
        row.push(s.pruned_at.clone().unwrap_or_default());
        row.push(s.degraded.to_string());
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// `article_id,policy_id,score` in link-set order.
pub fn write_links_csv(links: &LinkSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["article_id", "policy_id", "score"])?;
    for l in &links.links {
        w.write_record([l.article_id.as_str(), l.policy_id.as_str(), &l.score.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads `(article_id, policy_id)` pairs from a CSV with those two leading
/// columns, as written by [`write_links_csv`].
pub fn read_link_pairs(path: impl AsRef<Path>) -> Result<Vec<(String, String)>> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    if headers.get(0) != Some("article_id") || headers.get(1) != Some("policy_id") {
        return Err(Error::invalid(format!(
            "{} does not start with article_id,policy_id columns",
            path.display()
        )));
    }
    r.records()
        .map(|rec| {
            let rec = rec?;
            Ok((rec[0].to_string(), rec[1].to_string()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ls(a: &str, p: &str, score: f64, pruned: bool) -> LinkScore {
        LinkScore {
            article_id: a.into(),
            policy_id: p.into(),
            step_probs: vec![("h1".into(), 0.9)],
            similarity: (!pruned).then_some(score),
            score,
            pruned_at: pruned.then(|| "h1".to_string()),
            degraded: false,
        }
    }

    #[test]
    fn many_to_many_and_sorted() {
        let scores = vec![ls("a", "p", 0.6, false), ls("a", "q", 0.8, false), ls("b", "p", 0.2, false)];
        let set = emit_links(&scores, 0.5);
        let got: Vec<_> = set.pairs().collect();
        assert_eq!(got, vec![("a", "q"), ("a", "p")]);
    }

    #[test]
    fn zero_lambda_emits_every_unpruned() {
        let scores = vec![ls("a", "p", 0.0, false), ls("b", "p", 0.0, true)];
        assert_eq!(emit_links(&scores, 0.0).len(), 1);
    }

    #[test]
    fn csv_has_step_columns() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("links.csv");
        write_scores_csv(&[ls("a", "p", 0.5, false)], &["h1".into(), "h2".into()], &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "article_id,policy_id,score,similarity,h1,h2,pruned_at,degraded");
        assert_eq!(lines.next().unwrap(), "a,p,0.5,0.5,0.9,,,false");
    }

    #[test]
    fn links_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("links.csv");
        let set = emit_links(&[ls("A1", "P1", 0.9, false), ls("A2", "P1", 0.2, false)], 0.5);
        write_links_csv(&set, &path).unwrap();
        assert_eq!(read_link_pairs(&path).unwrap(), vec![("A1".to_string(), "P1".to_string())]);
    }
}
