//! The bundled English stop list and stop-word removal.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use sha2::{Digest, Sha256};

use super::{PipelineConfig, ReservedWordSet, TokenSeq};

const ENGLISH_STOPWORDS: &str = include_str!("../../data/english_stopwords.txt");

/// Words that carry meaning in entity names (negation, conjunction and
/// contraction fragments). Opt-in through `PipelineConfig::stop_list_keep`.
pub const RECOMMENDED_KEEP: [&str; 10] = ["and", "or", "not", "d", "i", "m", "o", "s", "t", "y"];

pub fn english_stop_list() -> &'static BTreeSet<String> {
    static LIST: OnceLock<BTreeSet<String>> = OnceLock::new();
    LIST.get_or_init(|| {
        ENGLISH_STOPWORDS
            .lines()
            .map(str::trim)
            .filter(|w| !w.is_empty())
            .map(str::to_owned)
            .collect()
    })
}

/// SHA-256 of the bundled stop-list file, hex encoded.
pub fn english_stop_list_checksum() -> String {
    hex(&Sha256::digest(ENGLISH_STOPWORDS.as_bytes()))
}

pub fn recommended_keep_set() -> BTreeSet<String> {
    RECOMMENDED_KEEP.iter().map(|w| (*w).to_owned()).collect()
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Drops tokens found in the effective stop list. When every token is a stop
/// word the input is returned unchanged.
pub fn remove_stop_words(tokens: &TokenSeq, config: &PipelineConfig) -> TokenSeq {
    remove_with_reserved(tokens, config, None)
}

/// As `remove_stop_words`, but reserved tokens are never dropped. Whether the
/// all-stop-words guard applies is decided without looking at `reserved`.
pub(crate) fn remove_with_reserved(
    tokens: &TokenSeq,
    config: &PipelineConfig,
    reserved: Option<&ReservedWordSet>,
) -> TokenSeq {
    if tokens.iter().all(|t| config.is_stop_word(t)) {
        return tokens.clone();
    }
    TokenSeq::new(
        tokens
            .iter()
            .filter(|t| reserved.is_some_and(|r| r.contains(t)) || !config.is_stop_word(t))
            .cloned(),
    )
}
