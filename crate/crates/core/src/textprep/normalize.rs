//! Token normalisation: tag stripping, lowercasing, separator and
//! punctuation removal. Digits and other special characters survive.

use super::TokenSeq;

/// Removes maximal `<...>` spans. A `<` with no closing `>` is kept.
pub(crate) fn strip_tags(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(open) = rest.find('<') {
        match rest[open..].find('>') {
            Some(close) => {
                out.push_str(&rest[..open]);
                out.push(' ');
                rest = &rest[open + close + 1..];
            }
            None => break,
        }
    }
    out.push_str(rest);
    out
}

fn is_punctuation(c: char) -> bool {
    super::tokenize::is_separator(c) && !c.is_whitespace()
}

/// Normalises one token. Whitespace inside a token (only possible when the
/// text was not tokenised) is collapsed to single spaces.
pub fn normalize_token(token: &str) -> String {
    strip_tags(token)
        .to_lowercase()
        .split_whitespace()
        .map(|word| word.chars().filter(|&c| !is_punctuation(c)).collect::<String>())
        .filter(|word| !word.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn normalize(tokens: &TokenSeq) -> TokenSeq {
    TokenSeq::new(tokens.iter().map(|t| normalize_token(t)))
}
