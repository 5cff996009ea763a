//! Tokenization, TF-IDF vectors, cosine similarity and empirical word
//! distributions shared by the rest of the pipeline.

mod distribution;
mod sparse;
mod tfidf;
mod tokenize;

pub use distribution::{word_probs, WordDistribution};
pub use sparse::{cosine, SparseVector};
pub use tfidf::{fit_tfidf, TfIdfModel, Vocabulary, VocabularyDump, VocabularyEntry};
pub use tokenize::{tokenize, tokenize_with, TokenizerConfig, NUMBER_TOKEN, STOPWORDS};

/// Anything that maps text into the shared sparse vector space.
///
/// Only TF-IDF ships; dense embedding providers would implement this and
/// return a densely-populated [`SparseVector`].
pub trait VectorSpace: Send + Sync {
    fn embed(&self, text: &str) -> SparseVector;
}

impl VectorSpace for TfIdfModel {
    fn embed(&self, text: &str) -> SparseVector {
        self.transform(text)
    }
}
