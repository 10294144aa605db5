//! A context-free part-of-speech guesser for single tokens. Entity names are
//! too short for a sequence tagger to help, so the guess uses a closed-class
//! lexicon and suffix cues, defaulting to noun.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pos {
    Noun,
    Verb,
    Adjective,
    Adverb,
}

impl Pos {
    pub const ALL: [Pos; 4] = [Pos::Noun, Pos::Verb, Pos::Adjective, Pos::Adverb];
}

const VERBS: &[&str] = &[
    "am", "are", "be", "been", "being", "can", "could", "did", "do", "does", "done", "gave",
    "get", "gets", "give", "gives", "got", "had", "has", "have", "is", "made", "make", "makes",
    "may", "might", "must", "shall", "should", "took", "was", "were", "will", "would", "wrote",
    "written",
];

const ADVERBS: &[&str] = &[
    "again", "almost", "already", "also", "always", "never", "not", "now", "often", "only",
    "soon", "still", "then", "too", "very",
];

const ADJECTIVES: &[&str] = &[
    "bad", "best", "better", "big", "early", "good", "high", "large", "last", "late", "long",
    "low", "main", "new", "old", "other", "same", "short", "small", "worse", "worst",
];

/// Words ending in `-ly` that are not adverbs.
const LY_NOUNS: &[&str] = &[
    "ally", "anomaly", "assembly", "family", "fly", "italy", "july", "monopoly", "rally", "reply",
    "supply",
];

pub fn guess_pos(token: &str) -> Pos {
    let len = token.chars().count();
    if VERBS.contains(&token) {
        return Pos::Verb;
    }
    if ADVERBS.contains(&token) {
        return Pos::Adverb;
    }
    if ADJECTIVES.contains(&token) {
        return Pos::Adjective;
    }
    if len > 4 && token.ends_with("ing") || len > 3 && token.ends_with("ed") {
        return Pos::Verb;
    }
    if len > 4 && token.ends_with("ly") && !LY_NOUNS.contains(&token) {
        return Pos::Adverb;
    }
    if len > 5 && ["ous", "ful", "able", "ible", "less", "ical"].iter().any(|s| token.ends_with(s)) {
        return Pos::Adjective;
    }
    if len > 5 && ["ize", "ise", "ify"].iter().any(|s| token.ends_with(s)) {
        return Pos::Verb;
    }
    Pos::Noun
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn guesses() {
        assert_eq!(guess_pos("reviewing"), Pos::Verb);
        assert_eq!(guess_pos("accepted"), Pos::Verb);
        assert_eq!(guess_pos("was"), Pos::Verb);
        assert_eq!(guess_pos("members"), Pos::Noun);
        assert_eq!(guess_pos("quickly"), Pos::Adverb);
        assert_eq!(guess_pos("family"), Pos::Noun);
        assert_eq!(guess_pos("famous"), Pos::Adjective);
        assert_eq!(guess_pos("better"), Pos::Adjective);
        assert_eq!(guess_pos("red"), Pos::Noun);
        assert_eq!(guess_pos("king"), Pos::Noun);
    }
}
