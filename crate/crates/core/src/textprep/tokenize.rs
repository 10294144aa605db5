//! Full-word tokenisation of entity names and labels.

use super::TokenSeq;

/// Characters that separate words and are dropped by the tokenizer.
pub(crate) fn is_separator(c: char) -> bool {
    c.is_whitespace()
        || matches!(
            c,
            '_' | '-' | '.' | ',' | ';' | ':' | '/' | '\\' | '|' | '(' | ')' | '[' | ']' | '{' | '}'
                | '"' | '\'' | '!' | '?' | '\u{2010}'..='\u{2015}' | '\u{2018}'..='\u{201f}' | '\u{2026}'
        )
}

/// Splits on separators, camel-case humps, letter/digit changes and the end
/// of an acronym (`NCIThesaurus` gives `NCI`, `Thesaurus`). HTML tags are
/// treated as separators.
pub fn tokenize(text: &str) -> TokenSeq {
    let stripped = super::normalize::strip_tags(text);
    let mut tokens = Vec::new();
    for chunk in stripped.split(is_separator) {
        split_chunk(chunk, &mut tokens);
    }
    TokenSeq::new(tokens)
}

fn split_chunk(chunk: &str, out: &mut Vec<String>) {
    let chars: Vec<char> = chunk.chars().collect();
    let mut start = 0;
    for i in 1..chars.len() {
        let (prev, cur) = (chars[i - 1], chars[i]);
        let next = chars.get(i + 1).copied();
        let camel = prev.is_lowercase() && cur.is_uppercase();
        let letter_digit = (prev.is_alphabetic() && cur.is_numeric())
            || (prev.is_numeric() && cur.is_alphabetic());
        let acronym_end =
            prev.is_uppercase() && cur.is_uppercase() && next.is_some_and(char::is_lowercase);
        if camel || letter_digit || acronym_end {
            out.push(chars[start..i].iter().collect());
            start = i;
        }
    }
    if start < chars.len() {
        out.push(chars[start..].iter().collect());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize(s).into_vec()
    }

    #[test]
    fn camel_case() {
        assert_eq!(toks("isReviewing"), ["is", "Reviewing"]);
        assert_eq!(toks("ArtGallery"), ["Art", "Gallery"]);
        assert_eq!(toks("isReviewedBy"), ["is", "Reviewed", "By"]);
    }

    #[test]
    fn separators() {
        assert_eq!(toks("art_gallery"), ["art", "gallery"]);
        assert_eq!(toks("Chromosome_Y"), ["Chromosome", "Y"]);
        assert_eq!(toks("Co-author"), ["Co", "author"]);
        assert_eq!(toks("  was_a  member-of. "), ["was", "a", "member", "of"]);
        assert_eq!(toks("Author/Reviewer"), ["Author", "Reviewer"]);
    }

    #[test]
    fn acronyms_and_digits() {
        assert_eq!(toks("NCIThesaurus"), ["NCI", "Thesaurus"]);
        assert_eq!(toks("HTMLParser"), ["HTML", "Parser"]);
        assert_eq!(toks("C12345"), ["C", "12345"]);
        assert_eq!(toks("Area51b"), ["Area", "51", "b"]);
        assert_eq!(toks("NCI"), ["NCI"]);
    }

    #[test]
    fn special_characters_stay() {
        assert_eq!(toks("R&D"), ["R&D"]);
        assert_eq!(toks("100%"), ["100%"]);
    }

    #[test]
    fn html_tags_separate() {
        assert_eq!(toks("<b>Heart</b> valve"), ["Heart", "valve"]);
    }

    #[test]
    fn empty() {
        assert!(toks("").is_empty());
        assert!(toks(" _-_ ").is_empty());
    }

    #[test]
    fn single_lowercase_word_is_fixed() {
        assert_eq!(toks("heart"), ["heart"]);
    }
}
