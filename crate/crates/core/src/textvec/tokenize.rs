use serde::{Deserialize, Serialize};

/// Literal token substituted for every maximal run of digits.
pub const NUMBER_TOKEN: &str = "<number>";

/// Default English stopword list. Only applied when a caller asks for it.
pub const STOPWORDS: &[&str] = &[
    "a", "about", "above", "after", "again", "against", "all", "am", "an", "and", "any", "are",
    "as", "at", "be", "because", "been", "before", "being", "below", "between", "both", "but",
    "by", "can", "could", "did", "do", "does", "doing", "down", "during", "each", "few", "for",
    "from", "further", "good", "had", "has", "have", "having", "he", "hello", "her", "here", "hers",
    "herself", "hi", "him", "himself", "his", "how", "i", "if", "im", "in", "into", "is", "it",
    "its", "itself", "just", "like", "me", "more", "most", "my", "myself", "name", "no", "nor",
    "not", "now", "of", "off", "on", "once", "only", "or", "other", "our", "ours", "ourselves",
    "out", "over", "own", "same", "she", "should", "so", "some", "such", "than", "thank", "thanks",
    "that", "the", "their", "theirs", "them", "themselves", "then", "there", "these", "they",
    "this", "those", "through", "to", "too", "under", "until", "up", "very", "was", "we", "were",
    "what", "when", "where", "which", "while", "who", "whom", "why", "will", "with", "would",
    "you", "your", "yours", "yourself", "yourselves",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizerConfig {
    /// Replace digit runs with [`NUMBER_TOKEN`].
    pub mask_numbers: bool,
    pub remove_stopwords: bool,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        Self {
            mask_numbers: true,
            remove_stopwords: false,
        }
    }
}

impl TokenizerConfig {
    pub fn with_stopwords_removed(mut self) -> Self {
        self.remove_stopwords = true;
        self
    }

    pub fn keep_numbers(mut self) -> Self {
        self.mask_numbers = false;
        self
    }
}

/// Tokenize with the default configuration (numbers masked, stopwords kept).
pub fn tokenize(text: &str) -> Vec<String> {
    tokenize_with(text, TokenizerConfig::default())
}

/// Lowercases, splits on whitespace and punctuation, and emits digit runs as
/// their own tokens. Apostrophes are dropped inside words (`don't` -> `dont`);
/// separators inside a digit run (`750,000`, `1.5`) are absorbed into the run.
pub fn tokenize_with(text: &str, config: TokenizerConfig) -> Vec<String> {
    let lowered = text.to_lowercase();
    let chars: Vec<char> = lowered.chars().collect();
    let mut tokens = Vec::new();
    let mut word = String::new();
    let mut digits = String::new();

    let flush_word = |word: &mut String, tokens: &mut Vec<String>| {
        if !word.is_empty() {
            tokens.push(std::mem::take(word));
        }
    };
    let flush_digits = |digits: &mut String, tokens: &mut Vec<String>| {
        if !digits.is_empty() {
            if config.mask_numbers {
                tokens.push(NUMBER_TOKEN.to_string());
            } else {
                tokens.push(digits.clone());
            }
            digits.clear();
        }
    };

    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '<' && starts_with_at(&chars, i, NUMBER_TOKEN) {
            flush_word(&mut word, &mut tokens);
            flush_digits(&mut digits, &mut tokens);
            tokens.push(NUMBER_TOKEN.to_string());
            i += NUMBER_TOKEN.chars().count();
            continue;
        }
        if c.is_ascii_digit() {
            flush_word(&mut word, &mut tokens);
            digits.push(c);
        } else if (c == ',' || c == '.')
            && !digits.is_empty()
            && chars.get(i + 1).is_some_and(|n| n.is_ascii_digit())
        {
            // thousands separator or decimal point inside a number
        } else if c.is_alphanumeric() {
            flush_digits(&mut digits, &mut tokens);
            word.push(c);
        } else if (c == '\'' || c == '\u{2019}') && !word.is_empty() {
            // contraction
        } else {
            flush_word(&mut word, &mut tokens);
            flush_digits(&mut digits, &mut tokens);
        }
        i += 1;
    }
    flush_word(&mut word, &mut tokens);
    flush_digits(&mut digits, &mut tokens);

    if config.remove_stopwords {
        tokens.retain(|t| STOPWORDS.binary_search(&t.as_str()).is_err());
    }
    tokens
}

fn starts_with_at(chars: &[char], at: usize, needle: &str) -> bool {
    let mut idx = at;
    for n in needle.chars() {
        match chars.get(idx) {
            Some(&c) if c == n => idx += 1,
            _ => return false,
        }
    }
    true
}
