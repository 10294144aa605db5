//! Yes/no LLM verdicts used to drop false mappings after preprocessing.
//!
//! Cells whose tokenised and normalised texts already agree are kept without
//! asking; every other cell is put to a chat model through one of four prompt
//! templates and removed on a "no".

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

mod cache;
mod provider;
mod repair;

pub use cache::{CacheKey, CacheRecord, VerdictCache};
pub use provider::{ChatProvider, HttpProvider, ProviderConfig, StubProvider};
pub use repair::{classify_pair, repair_alignment, CellAudit, CellDecision, RepairOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub enum PromptTemplate {
    #[default]
    PT1,
    PT2,
    PT3,
    PT4,
}

const QUESTION: &str = "Is {Entity1} equivalent to {Entity2}? Answer yes or no.";
const EXAMPLE: &str = "Example: Hair_root is equivalent to Hair_Root.\n";
const EXPLAIN: &str = "\nWrite a short explanation.";

impl PromptTemplate {
    pub const ALL: [PromptTemplate; 4] =
        [PromptTemplate::PT1, PromptTemplate::PT2, PromptTemplate::PT3, PromptTemplate::PT4];

    /// Template text with `{Entity1}` and `{Entity2}` placeholders.
    pub fn body(self) -> String {
        let (example, explain) = match self {
            PromptTemplate::PT1 => (false, false),
            PromptTemplate::PT2 => (true, false),
            PromptTemplate::PT3 => (false, true),
            PromptTemplate::PT4 => (true, true),
        };
        let mut body = String::new();
        if example {
            body.push_str(EXAMPLE);
        }
        body.push_str(QUESTION);
        if explain {
            body.push_str(EXPLAIN);
        }
        body
    }

    pub fn id(self) -> &'static str {
        match self {
            PromptTemplate::PT1 => "PT1",
            PromptTemplate::PT2 => "PT2",
            PromptTemplate::PT3 => "PT3",
            PromptTemplate::PT4 => "PT4",
        }
    }
}

impl fmt::Display for PromptTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for PromptTemplate {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "PT1" | "1" => Ok(PromptTemplate::PT1),
            "PT2" | "2" => Ok(PromptTemplate::PT2),
            "PT3" | "3" => Ok(PromptTemplate::PT3),
            "PT4" | "4" => Ok(PromptTemplate::PT4),
            other => Err(format!("unknown prompt template `{other}`")),
        }
    }
}

/// Substitutes the two entity texts into the template.
pub fn render_prompt(template: PromptTemplate, entity1: &str, entity2: &str) -> Result<String> {
    if entity1.is_empty() || entity2.is_empty() {
        return Err(Error::EmptyEntityText);
    }
    let body = template.body();
    let (before, rest) = body.split_once("{Entity1}").expect("placeholder");
    let (middle, after) = rest.split_once("{Entity2}").expect("placeholder");
    Ok(format!("{before}{entity1}{middle}{entity2}{after}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Yes,
    No,
    Unparseable,
}

impl Answer {
    pub fn as_str(self) -> &'static str {
        match self {
            Answer::Yes => "yes",
            Answer::No => "no",
            Answer::Unparseable => "unparseable",
        }
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LlmVerdict {
    pub answer: Answer,
    pub raw_text: String,
    pub model: String,
    pub template: PromptTemplate,
    pub cached: bool,
}

fn single_answer(text: &str) -> Option<Answer> {
    let mut found = None;
    for word in text.split(|c: char| !c.is_alphanumeric()) {
        let answer = if word.eq_ignore_ascii_case("yes") {
            Answer::Yes
        } else if word.eq_ignore_ascii_case("no") {
            Answer::No
        } else {
            continue;
        };
        match found {
            None => found = Some(answer),
            Some(prev) if prev != answer => return None,
            Some(_) => {}
        }
    }
    found
}

/// Reads a yes/no answer. The first sentence decides when it contains only
/// one of the two words; otherwise the whole text must contain only one.
pub fn parse_verdict(raw: &str) -> Answer {
    let trimmed = raw.trim_start();
    let first_sentence = match trimmed.find(['.', '!', '?', '\n']) {
        Some(end) => &trimmed[..end],
        None => trimmed,
    };
    single_answer(first_sentence)
        .or_else(|| single_answer(raw))
        .unwrap_or(Answer::Unparseable)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn template_bodies() {
        assert_eq!(
            render_prompt(PromptTemplate::PT1, "reviews", "isReviewing").unwrap(),
            "Is reviews equivalent to isReviewing? Answer yes or no."
        );
        assert_eq!(
            PromptTemplate::PT2.body(),
            "Example: Hair_root is equivalent to Hair_Root.\nIs {Entity1} equivalent to {Entity2}? Answer yes or no."
        );
        assert_eq!(
            PromptTemplate::PT3.body(),
            "Is {Entity1} equivalent to {Entity2}? Answer yes or no.\nWrite a short explanation."
        );
        assert_eq!(
            PromptTemplate::PT4.body(),
            "Example: Hair_root is equivalent to Hair_Root.\nIs {Entity1} equivalent to {Entity2}? Answer yes or no.\nWrite a short explanation."
        );
    }

    #[test]
    fn no_escaping() {
        assert_eq!(
            render_prompt(PromptTemplate::PT1, "{Entity2}", "<b>").unwrap(),
            "Is {Entity2} equivalent to <b>? Answer yes or no."
        );
        assert!(matches!(render_prompt(PromptTemplate::PT1, "", "x"), Err(Error::EmptyEntityText)));
    }

    #[test]
    fn verdicts() {
        assert_eq!(parse_verdict("Yes, they are equivalent."), Answer::Yes);
        assert_eq!(parse_verdict("no"), Answer::No);
        assert_eq!(parse_verdict("NO."), Answer::No);
        assert_eq!(parse_verdict("These entities are related."), Answer::Unparseable);
        assert_eq!(parse_verdict("I think so. Yes."), Answer::Yes);
        assert_eq!(parse_verdict("Yes or no? Hard to say. The answer is no."), Answer::Unparseable);
        assert_eq!(parse_verdict("Yes or no: yes and no."), Answer::Unparseable);
        assert_eq!(parse_verdict("Answer: yes\nThe labels differ only in case, so no doubt."), Answer::Yes);
        assert_eq!(parse_verdict("Nope, yesterday"), Answer::Unparseable);
    }

    #[test]
    fn template_parse() {
        assert_eq!("pt3".parse::<PromptTemplate>().unwrap(), PromptTemplate::PT3);
        assert!("PT5".parse::<PromptTemplate>().is_err());
    }
}
