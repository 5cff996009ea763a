use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::features::NewsworthyExample;
use crate::error::Error;

pub const QUESTION: &str = "Is this newsworthy? Answer \"yes\" or \"no\".";

/// Which prompt sections are rendered: policy, meeting discussion, public
/// comment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PromptSections {
    pub policy: bool,
    pub meeting: bool,
    pub public: bool,
}

impl PromptSections {
    pub const FULL: Self = Self {
        policy: true,
        meeting: true,
        public: true,
    };

    pub fn without_policy(self) -> Self {
        Self { policy: false, ..self }
    }

    pub fn without_public(self) -> Self {
        Self { public: false, ..self }
    }
}

impl Default for PromptSections {
    fn default() -> Self {
        Self::FULL
    }
}

impl fmt::Display for PromptSections {
    /// `full`, or the included section numbers such as `(1), (2)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Self::FULL {
            return f.write_str("full");
        }
        let parts: Vec<&str> = [(self.policy, "(1)"), (self.meeting, "(2)"), (self.public, "(3)")]
            .into_iter()
            .filter_map(|(on, s)| on.then_some(s))
            .collect();
        f.write_str(&parts.join(", "))
    }
}

impl FromStr for PromptSections {
    type Err = Error;

    /// Accepts `full` or a list of section numbers like `1,2` or `(2), (3)`.
    fn from_str(s: &str) -> Result<Self, Error> {
        if s.trim().eq_ignore_ascii_case("full") {
            return Ok(Self::FULL);
        }
        let mut out = Self {
            policy: false,
            meeting: false,
            public: false,
        };
        for part in s.split([',', ' ']).map(|p| p.trim_matches(|c: char| c == '(' || c == ')' || c.is_whitespace())) {
            match part {
                "" => {}
                "1" => out.policy = true,
                "2" => out.meeting = true,
                "3" => out.public = true,
                other => return Err(Error::invalid(format!("unknown prompt section {other:?}"))),
            }
        }
        if !(out.policy || out.meeting || out.public) {
            return Err(Error::invalid("prompt needs at least one section"));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PromptConfig {
    /// Word cap for discussion and public-comment text.
    pub word_limit: usize,
    /// Word cap for the policy text; `None` keeps it whole.
    pub policy_word_limit: Option<usize>,
}

impl Default for PromptConfig {
    fn default() -> Self {
        Self {
            word_limit: 50,
            policy_word_limit: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptRecord {
    pub policy_id: String,
    pub meeting_id: String,
    pub label: bool,
    pub sections: PromptSections,
    pub word_limit: usize,
    pub text: String,
}

pub fn truncate_words(text: &str, limit: usize) -> String {
    text.split_whitespace().take(limit).collect::<Vec<_>>().join(" ")
}

fn fmt_minutes(m: f64) -> String {
    format!("{m:.1}")
}

pub fn assemble_prompt(example: &NewsworthyExample, sections: PromptSections, config: PromptConfig) -> PromptRecord {
    let mut lines = Vec::new();
    if sections.policy {
        let text = match config.policy_word_limit {
            Some(n) => truncate_words(&example.policy_text, n),
            None => example.policy_text.split_whitespace().collect::<Vec<_>>().join(" "),
        };
        lines.push(format!("Policy description: \"{text}\""));
        lines.push(format!(
            "Presented in {} prior meetings, {} news articles",
            example.n_prior_meetings, example.n_prior_articles
        ));
    }
    if sections.meeting {
        lines.push(format!(
            "Introduced by {} speakers in the meeting for {} minutes:",
            example.n_speakers,
            fmt_minutes(example.discussion_minutes)
        ));
        lines.push(format!("\"{}\"", truncate_words(&example.discussion_text, config.word_limit)));
    }
    if sections.public {
        lines.push(format!(
            "{} members of the public spoke for {:.0} minutes.",
            example.n_public_commenters, example.public_comment_minutes
        ));
        lines.push(format!("\"{}\"", truncate_words(&example.public_comment_text, config.word_limit)));
    }
    lines.push(QUESTION.to_string());
    PromptRecord {
        policy_id: example.policy_id.clone(),
        meeting_id: example.meeting_id.clone(),
        label: example.label,
        sections,
        word_limit: config.word_limit,
        text: lines.join("\n"),
    }
}
