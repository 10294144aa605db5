//! Text preprocessing: the individual steps and their composition into a
//! canonical-key function.
//!
//! A pipeline is an ordered subset of tokenise (`T`), normalise (`N`), stop-word
//! removal (`R`), stemming (`S`) and lemmatisation (`L`). Without `T` the whole
//! text is one token.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub mod lemma;
pub mod normalize;
pub mod pos;
pub mod stem;
pub mod stopwords;
pub mod tokenize;

pub use lemma::MorphyLexicon;
pub use normalize::{normalize, normalize_token};
pub use pos::{guess_pos, Pos};
pub use stem::StemAlgorithm;
pub use stopwords::{
    english_stop_list, english_stop_list_checksum, recommended_keep_set, remove_stop_words,
};
pub use tokenize::tokenize;

/// An ordered list of non-empty tokens.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TokenSeq(Vec<String>);

impl TokenSeq {
    /// Builds a sequence, dropping empty tokens.
    pub fn new<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        TokenSeq(tokens.into_iter().map(Into::into).filter(|t| !t.is_empty()).collect())
    }

    pub fn iter(&self) -> std::slice::Iter<'_, String> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<String> {
        self.0
    }

    pub fn to_key(&self) -> CanonicalKey {
        CanonicalKey::from_tokens(&self.0)
    }
}

impl<'a> IntoIterator for &'a TokenSeq {
    type Item = &'a String;
    type IntoIter = std::slice::Iter<'a, String>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// The string two entities must share to be matched.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalKey(String);

impl CanonicalKey {
    /// Tokens joined by single spaces.
    pub fn from_tokens<S: AsRef<str>>(tokens: &[S]) -> Self {
        let joined: Vec<&str> =
            tokens.iter().flat_map(|t| t.as_ref().split_whitespace()).collect();
        CanonicalKey(joined.join(" "))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Step {
    Tokenise,
    Normalise,
    RemoveStopWords,
    Stem(StemAlgorithm),
    /// Lemmatisation, with or without a part-of-speech guess per token
    /// (without one every token is treated as a noun).
    Lemmatise { pos_tagging: bool },
}

impl Step {
    /// Short code used in pipeline identifiers: `T`, `N`, `R`, `S:porter`, `L`, `LT`.
    pub fn code(self) -> String {
        match self {
            Step::Tokenise => "T".into(),
            Step::Normalise => "N".into(),
            Step::RemoveStopWords => "R".into(),
            Step::Stem(alg) => format!("S:{alg}"),
            Step::Lemmatise { pos_tagging: false } => "L".into(),
            Step::Lemmatise { pos_tagging: true } => "LT".into(),
        }
    }

    fn is_word_level(self) -> bool {
        matches!(self, Step::RemoveStopWords | Step::Stem(_) | Step::Lemmatise { .. })
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code())
    }
}

impl FromStr for Step {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let raw = s.trim();
        let step = match raw.to_ascii_uppercase().as_str() {
            "T" => Step::Tokenise,
            "N" => Step::Normalise,
            "R" => Step::RemoveStopWords,
            "S" => Step::Stem(StemAlgorithm::Porter),
            "L" => Step::Lemmatise { pos_tagging: false },
            "LT" | "L:POS" => Step::Lemmatise { pos_tagging: true },
            upper => match upper.strip_prefix("S:") {
                Some(_) => Step::Stem(raw[2..].parse().map_err(Error::InvalidPipeline)?),
                None => return Err(Error::InvalidPipeline(format!("unknown step `{raw}`"))),
            },
        };
        Ok(step)
    }
}

/// Steps plus the stop list they use.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineConfig {
    steps: Vec<Step>,
    stop_list: BTreeSet<String>,
    stop_list_keep: BTreeSet<String>,
}

impl PipelineConfig {
    /// A validated pipeline using the bundled English stop list.
    pub fn new(steps: Vec<Step>) -> Result<Self> {
        let config = PipelineConfig {
            steps,
            stop_list: english_stop_list().clone(),
            stop_list_keep: BTreeSet::new(),
        };
        config.validate()?;
        Ok(config)
    }

    /// Parses a comma-separated list of step codes such as `T,N,R,S:porter`.
    /// `none`, `-` or an empty string give the empty pipeline.
    pub fn parse(spec: &str) -> Result<Self> {
        let trimmed = spec.trim();
        if matches!(trimmed, "" | "none" | "-" | "\u{2205}") {
            return PipelineConfig::new(Vec::new());
        }
        let steps = trimmed.split(',').map(str::parse).collect::<Result<Vec<Step>>>()?;
        PipelineConfig::new(steps)
    }

    pub fn with_stop_list(mut self, stop_list: BTreeSet<String>) -> Self {
        self.stop_list = stop_list;
        self
    }

    pub fn with_stop_list_keep(mut self, keep: BTreeSet<String>) -> Self {
        self.stop_list_keep = keep;
        self
    }

    /// Tokenise may only come first, each step appears at most once, and
    /// stemming excludes lemmatisation.
    pub fn validate(&self) -> Result<()> {
        if let Some(pos) = self.steps.iter().position(|s| *s == Step::Tokenise) {
            if pos != 0 {
                return Err(Error::InvalidPipeline("tokenise must be the first step".into()));
            }
        }
        let mut seen = BTreeSet::new();
        for step in &self.steps {
            let kind = match step {
                Step::Stem(_) | Step::Lemmatise { .. } => "S/L",
                Step::Tokenise => "T",
                Step::Normalise => "N",
                Step::RemoveStopWords => "R",
            };
            if !seen.insert(kind) {
                return Err(Error::InvalidPipeline(match kind {
                    "S/L" => "a pipeline may stem or lemmatise, not both".into(),
                    _ => format!("step `{step}` appears more than once"),
                }));
            }
        }
        Ok(())
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn stop_list(&self) -> &BTreeSet<String> {
        &self.stop_list
    }

    pub fn stop_list_keep(&self) -> &BTreeSet<String> {
        &self.stop_list_keep
    }

    pub fn is_stop_word(&self, token: &str) -> bool {
        self.stop_list.contains(token) && !self.stop_list_keep.contains(token)
    }

    pub fn needs_lexicon(&self) -> bool {
        self.steps.iter().any(|s| matches!(s, Step::Lemmatise { .. }))
    }

    /// Reserved-word discovery compares tokenised, normalised sequences.
    pub fn supports_reserved_words(&self) -> bool {
        self.steps.contains(&Step::Tokenise) && self.steps.contains(&Step::Normalise)
    }

    /// Identifier such as `T,N,R,S:porter`; the empty pipeline is `none`.
    pub fn id(&self) -> String {
        if self.steps.is_empty() {
            return "none".into();
        }
        self.steps.iter().map(|s| s.code()).collect::<Vec<_>>().join(",")
    }
}

impl fmt::Display for PipelineConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

/// Words that bypass stop-word removal, stemming and lemmatisation.
/// Stored and compared in lowercase.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReservedWordSet(BTreeSet<String>);

impl ReservedWordSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, word: &str) -> bool {
        let word = word.trim().to_lowercase();
        !word.is_empty() && self.0.insert(word)
    }

    pub fn contains(&self, word: &str) -> bool {
        if word.chars().any(char::is_uppercase) {
            self.0.contains(&word.to_lowercase())
        } else {
            self.0.contains(word)
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Words in sorted order.
    pub fn iter(&self) -> impl Iterator<Item = &str> + '_ {
        self.0.iter().map(String::as_str)
    }

    pub fn union(&self, other: &ReservedWordSet) -> ReservedWordSet {
        ReservedWordSet(self.0.union(&other.0).cloned().collect())
    }

    /// One word per line; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Self {
        text.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect()
    }

    /// Sorted, one word per line.
    pub fn to_file_string(&self) -> String {
        self.0.iter().map(|w| format!("{w}\n")).collect()
    }

    pub fn read_from(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| Error::io(format!("reading reserved words {}", path.display()), e))?;
        Ok(Self::parse(&text))
    }

    pub fn write_to(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_file_string())
            .map_err(|e| Error::io(format!("writing reserved words {}", path.display()), e))
    }
}

impl<'a> FromIterator<&'a str> for ReservedWordSet {
    fn from_iter<I: IntoIterator<Item = &'a str>>(iter: I) -> Self {
        let mut set = ReservedWordSet::new();
        for word in iter {
            set.insert(word);
        }
        set
    }
}

impl FromIterator<String> for ReservedWordSet {
    fn from_iter<I: IntoIterator<Item = String>>(iter: I) -> Self {
        let mut set = ReservedWordSet::new();
        for word in iter {
            set.insert(&word);
        }
        set
    }
}

/// A validated configuration bound to the resources it needs.
#[derive(Debug, Clone)]
pub struct Pipeline {
    config: PipelineConfig,
    lexicon: Option<Arc<MorphyLexicon>>,
}

impl Pipeline {
    /// Fails with `LexiconUnavailable` when the configuration lemmatises and
    /// no lexicon is supplied.
    pub fn new(config: PipelineConfig, lexicon: Option<Arc<MorphyLexicon>>) -> Result<Self> {
        config.validate()?;
        if config.needs_lexicon() && lexicon.is_none() {
            return Err(Error::LexiconUnavailable {
                path: Default::default(),
                reason: "lemmatisation requested without a WordNet lexicon".into(),
            });
        }
        Ok(Pipeline { config, lexicon })
    }

    /// Loads the bundled WordNet files when the configuration needs them.
    pub fn with_bundled_lexicon(config: PipelineConfig) -> Result<Self> {
        let lexicon = if config.needs_lexicon() {
            Some(Arc::new(MorphyLexicon::load_bundled()?))
        } else {
            None
        };
        Pipeline::new(config, lexicon)
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn lexicon(&self) -> Option<&Arc<MorphyLexicon>> {
        self.lexicon.as_ref()
    }

    pub fn id(&self) -> String {
        self.config.id()
    }

    fn initial_tokens(&self, text: &str) -> TokenSeq {
        if self.config.steps.first() == Some(&Step::Tokenise) {
            tokenize(text)
        } else {
            TokenSeq::new([text.split_whitespace().collect::<Vec<_>>().join(" ")])
        }
    }

    /// Token sequence after every step.
    pub fn tokens(&self, text: &str, reserved: Option<&ReservedWordSet>) -> TokenSeq {
        let reserved = reserved.filter(|r| !r.is_empty());
        let is_reserved = |t: &str| reserved.is_some_and(|r| r.contains(t));
        let mut tokens = self.initial_tokens(text);
        for step in &self.config.steps {
            tokens = match *step {
                Step::Tokenise => tokens,
                Step::Normalise => normalize(&tokens),
                Step::RemoveStopWords => {
                    stopwords::remove_with_reserved(&tokens, &self.config, reserved)
                }
                Step::Stem(_) | Step::Lemmatise { .. } => TokenSeq::new(tokens.iter().map(|t| {
                    if is_reserved(t) {
                        t.clone()
                    } else {
                        self.transform_word(*step, t)
                    }
                })),
            };
        }
        tokens
    }

    /// Canonical key of `text`.
    pub fn apply(&self, text: &str, reserved: Option<&ReservedWordSet>) -> CanonicalKey {
        self.tokens(text, reserved).to_key()
    }

    /// The tokenise and normalise steps only.
    pub fn phase1(&self, text: &str) -> TokenSeq {
        let mut tokens = self.initial_tokens(text);
        if self.config.steps.contains(&Step::Normalise) {
            tokens = normalize(&tokens);
        }
        tokens
    }

    fn transform_word(&self, step: Step, word: &str) -> String {
        match step {
            Step::Stem(alg) => alg.stem(word),
            Step::Lemmatise { pos_tagging } => {
                let lexicon = self.lexicon.as_ref().expect("checked in Pipeline::new");
                lemmatize_word(word, pos_tagging, lexicon)
            }
            _ => word.to_owned(),
        }
    }

    /// The word-level steps (stop-word removal, stemming, lemmatisation)
    /// applied to a single word with no empty-result guard. `None` means the
    /// word is removed as a stop word.
    pub fn word_transform(&self, word: &str) -> Option<String> {
        let mut current = word.to_owned();
        for step in self.config.steps.iter().filter(|s| s.is_word_level()) {
            match step {
                Step::RemoveStopWords => {
                    if self.config.is_stop_word(&current) {
                        return None;
                    }
                }
                _ => current = self.transform_word(*step, &current),
            }
        }
        Some(current)
    }

    /// True when the word-level steps leave `word` as it is.
    pub fn is_immutable(&self, word: &str) -> bool {
        self.word_transform(word).as_deref() == Some(word)
    }
}

/// Stems every token.
pub fn stem(tokens: &TokenSeq, algorithm: StemAlgorithm) -> TokenSeq {
    TokenSeq::new(tokens.iter().map(|t| algorithm.stem(t)))
}

/// Context-free part-of-speech guess for every token.
pub fn pos_tag(tokens: &TokenSeq) -> Vec<(String, Pos)> {
    tokens.iter().map(|t| (t.clone(), guess_pos(t))).collect()
}

/// Lemma of one lowercase word; other tokens pass through.
pub fn lemmatize_word(word: &str, use_pos: bool, lexicon: &MorphyLexicon) -> String {
    if !word.chars().all(char::is_lowercase) {
        return word.to_owned();
    }
    let pos = if use_pos { guess_pos(word) } else { Pos::Noun };
    lexicon.lemmatize(word, pos)
}

/// Lemmatises every token, as a noun unless `use_pos` is set.
pub fn lemmatize(tokens: &TokenSeq, use_pos: bool, lexicon: &MorphyLexicon) -> TokenSeq {
    TokenSeq::new(tokens.iter().map(|t| lemmatize_word(t, use_pos, lexicon)))
}

/// Canonical key of `text` under `pipeline`, with `reserved` words protected.
pub fn apply_pipeline(
    text: &str,
    pipeline: &Pipeline,
    reserved: Option<&ReservedWordSet>,
) -> CanonicalKey {
    pipeline.apply(text, reserved)
}
