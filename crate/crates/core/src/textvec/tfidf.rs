use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::sparse::SparseVector;
use super::tokenize::{tokenize_with, TokenizerConfig};
use crate::error::{Error, Result};

/// Term index with document frequencies. Indices are dense `0..V` in
/// first-seen order over the fitting corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, usize>,
    df: Vec<u32>,
    n_docs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VocabularyEntry {
    pub index: usize,
    pub df: u32,
}

/// On-disk form: `{"terms": {term: {index, df}}, "n_docs": N}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VocabularyDump {
    pub terms: BTreeMap<String, VocabularyEntry>,
    pub n_docs: usize,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn term(&self, index: usize) -> Option<&str> {
        self.terms.get(index).map(String::as_str)
    }

    pub fn df(&self, index: usize) -> u32 {
        self.df[index]
    }

    pub fn to_dump(&self) -> VocabularyDump {
        VocabularyDump {
            terms: self
                .terms
                .iter()
                .enumerate()
                .map(|(i, t)| (t.clone(), VocabularyEntry { index: i, df: self.df[i] }))
                .collect(),
            n_docs: self.n_docs,
        }
    }

    pub fn from_dump(dump: VocabularyDump) -> Result<Self> {
        let v = dump.terms.len();
        let mut terms = vec![None; v];
        let mut df = vec![0u32; v];
        for (term, entry) in dump.terms {
            if entry.index >= v || terms[entry.index].is_some() {
                return Err(Error::invalid(format!("vocabulary index {} is not dense", entry.index)));
            }
            if entry.df == 0 || entry.df as usize > dump.n_docs {
                return Err(Error::invalid(format!("df of {term:?} outside [1, n_docs]")));
            }
            df[entry.index] = entry.df;
            terms[entry.index] = Some(term);
        }
        let terms: Vec<String> = terms.into_iter().map(Option::unwrap).collect();
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Ok(Self {
            terms,
            index,
            df,
            n_docs: dump.n_docs,
        })
    }
}

/// Fitted TF-IDF space: raw-count tf, smoothed idf `ln((1+N)/(1+df)) + 1`,
/// L2-normalized output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TfIdfDump", into = "TfIdfDump")]
pub struct TfIdfModel {
    vocab: Vocabulary,
    idf: Vec<f64>,
    tokenizer: TokenizerConfig,
}

#[derive(Serialize, Deserialize)]
struct TfIdfDump {
    vocabulary: VocabularyDump,
    tokenizer: TokenizerConfig,
}

impl TryFrom<TfIdfDump> for TfIdfModel {
    type Error = Error;
    fn try_from(d: TfIdfDump) -> Result<Self> {
        Ok(Self::from_vocabulary(Vocabulary::from_dump(d.vocabulary)?, d.tokenizer))
    }
}

impl From<TfIdfModel> for TfIdfDump {
    fn from(m: TfIdfModel) -> Self {
        TfIdfDump {
            vocabulary: m.vocab.to_dump(),
            tokenizer: m.tokenizer,
        }
    }
}

/// Fits with the default tokenizer.
pub fn fit_tfidf<S: AsRef<str>>(documents: &[S]) -> Result<TfIdfModel> {
    TfIdfModel::fit(documents, TokenizerConfig::default())
}

impl TfIdfModel {
    pub fn fit<S: AsRef<str>>(documents: &[S], tokenizer: TokenizerConfig) -> Result<Self> {
        let tokenized: Vec<Vec<String>> = documents
            .iter()
            .map(|d| tokenize_with(d.as_ref(), tokenizer))
            .collect();
        Self::fit_tokens(&tokenized, tokenizer)
    }

    pub fn fit_tokens(documents: &[Vec<String>], tokenizer: TokenizerConfig) -> Result<Self> {
        if documents.is_empty() {
            return Err(Error::EmptyCorpus("tf-idf needs at least one document"));
        }
        let mut terms = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut df: Vec<u32> = Vec::new();
        let mut seen_in_doc: Vec<usize> = Vec::new();
        for (doc_id, doc) in documents.iter().enumerate() {
            for tok in doc {
                let idx = match index.get(tok) {
                    Some(&i) => i,
                    None => {
                        let i = terms.len();
                        terms.push(tok.clone());
                        index.insert(tok.clone(), i);
                        df.push(0);
                        seen_in_doc.push(usize::MAX);
                        i
                    }
                };
                if seen_in_doc[idx] != doc_id {
                    seen_in_doc[idx] = doc_id;
                    df[idx] += 1;
                }
            }
        }
        let vocab = Vocabulary {
            terms,
            index,
            df,
            n_docs: documents.len(),
        };
        Ok(Self::from_vocabulary(vocab, tokenizer))
    }

    pub fn from_vocabulary(vocab: Vocabulary, tokenizer: TokenizerConfig) -> Self {
        let n = vocab.n_docs as f64;
        let idf = vocab
            .df
            .iter()
            .map(|&df| ((1.0 + n) / (1.0 + df as f64)).ln() + 1.0)
            .collect();
        Self {
            vocab,
            idf,
            tokenizer,
        }
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn tokenizer(&self) -> TokenizerConfig {
        self.tokenizer
    }

    pub fn dim(&self) -> usize {
        self.vocab.len()
    }

    pub fn idf(&self, term: &str) -> Option<f64> {
        self.vocab.index_of(term).map(|i| self.idf[i])
    }

    pub fn transform(&self, text: &str) -> SparseVector {
        self.transform_tokens(&tokenize_with(text, self.tokenizer))
    }

    /// Out-of-vocabulary tokens are dropped; no in-vocabulary token gives the zero vector.
    pub fn transform_tokens<S: AsRef<str>>(&self, tokens: &[S]) -> SparseVector {
        let mut counts: HashMap<usize, f64> = HashMap::new();
        for t in tokens {
            if let Some(i) = self.vocab.index_of(t.as_ref()) {
                *counts.entry(i).or_insert(0.0) += 1.0;
            }
        }
        let pairs = counts.into_iter().map(|(i, tf)| (i, tf * self.idf[i])).collect();
        SparseVector::from_pairs(pairs).normalized()
    }
}
