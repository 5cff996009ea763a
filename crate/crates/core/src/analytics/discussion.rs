use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::newsworthy::NewsworthyExample;
use crate::util::mean;

/// Class-conditional means of the meeting-side features.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMeans {
    pub n: usize,
    pub minutes: f64,
    pub words: f64,
    pub speakers: f64,
    pub public_commenters: f64,
}

impl ClassMeans {
    fn of(examples: &[&NewsworthyExample]) -> Option<Self> {
        if examples.is_empty() {
            return None;
        }
        let avg = |f: fn(&NewsworthyExample) -> f64| mean(&examples.iter().map(|e| f(e)).collect::<Vec<_>>());
        Some(Self {
            n: examples.len(),
            minutes: avg(|e| e.discussion_minutes),
            words: avg(|e| e.n_words as f64),
            speakers: avg(|e| e.n_speakers as f64),
            public_commenters: avg(|e| e.n_public_commenters as f64),
        })
    }
}

/// Share of each class whose discussion word count falls in `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WordsBucket {
    pub lo: usize,
    pub hi: usize,
    pub n_positive: usize,
    pub n_negative: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscussionComparison {
    pub positive: Option<ClassMeans>,
    pub negative: Option<ClassMeans>,
    pub words_distribution: Vec<WordsBucket>,
}

impl DiscussionComparison {
    /// Positive over negative mean discussion minutes, when both are defined
    /// and the denominator is non-zero.
    pub fn minutes_ratio(&self) -> Option<f64> {
        match (self.positive, self.negative) {
            (Some(p), Some(n)) if n.minutes > 0.0 => Some(p.minutes / n.minutes),
            _ => None,
        }
    }
}

pub fn discussion_comparison(examples: &[NewsworthyExample], bin_width: usize) -> Result<DiscussionComparison> {
    if bin_width == 0 {
        return Err(Error::OutOfRange {
            what: "bin_width",
            value: "0".to_string(),
            range: "1..".to_string(),
        });
    }
    let (pos, neg): (Vec<&NewsworthyExample>, Vec<&NewsworthyExample>) = examples.iter().partition(|e| e.label);
    let n_bins = examples.iter().map(|e| e.n_words / bin_width + 1).max().unwrap_or(0);
    let mut words_distribution: Vec<WordsBucket> = (0..n_bins)
        .map(|b| WordsBucket {
            lo: b * bin_width,
            hi: (b + 1) * bin_width,
            n_positive: 0,
            n_negative: 0,
        })
        .collect();
    for e in examples {
        let bucket = &mut words_distribution[e.n_words / bin_width];
        if e.label {
            bucket.n_positive += 1;
        } else {
            bucket.n_negative += 1;
        }
    }
    Ok(DiscussionComparison {
        positive: ClassMeans::of(&pos),
        negative: ClassMeans::of(&neg),
        words_distribution,
    })
}
