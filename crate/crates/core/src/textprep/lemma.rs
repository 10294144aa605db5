//! WordNet-based lemmatisation using the morphy procedure: exception lists
//! first, then one round of detachment rules, keeping only candidates that are
//! WordNet lemmas and preferring the shortest.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::pos::Pos;
use super::stopwords::hex;
use crate::error::{Error, Result};

fn pos_file_stem(pos: Pos) -> &'static str {
    match pos {
        Pos::Noun => "noun",
        Pos::Verb => "verb",
        Pos::Adjective => "adj",
        Pos::Adverb => "adv",
    }
}

fn pos_index(pos: Pos) -> usize {
    match pos {
        Pos::Noun => 0,
        Pos::Verb => 1,
        Pos::Adjective => 2,
        Pos::Adverb => 3,
    }
}

fn substitutions(pos: Pos) -> &'static [(&'static str, &'static str)] {
    match pos {
        Pos::Noun => &[
            ("s", ""),
            ("ses", "s"),
            ("ves", "f"),
            ("xes", "x"),
            ("zes", "z"),
            ("ches", "ch"),
            ("shes", "sh"),
            ("men", "man"),
            ("ies", "y"),
        ],
        Pos::Verb => &[
            ("s", ""),
            ("ies", "y"),
            ("es", "e"),
            ("es", ""),
            ("ed", "e"),
            ("ed", ""),
            ("ing", "e"),
            ("ing", ""),
        ],
        Pos::Adjective => &[("er", ""), ("est", ""), ("er", "e"), ("est", "e")],
        Pos::Adverb => &[],
    }
}

/// The WordNet lemma index and exception lists for the four open classes.
#[derive(Debug)]
pub struct MorphyLexicon {
    lemmas: [HashSet<String>; 4],
    exceptions: [HashMap<String, Vec<String>>; 4],
    checksum: String,
    source: PathBuf,
}

impl MorphyLexicon {
    /// Directory of the WordNet files bundled with this crate.
    pub fn bundled_dir() -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join("wordnet")
    }

    pub fn load_bundled() -> Result<Self> {
        Self::load(Self::bundled_dir())
    }

    /// Loads `index.{noun,verb,adj,adv}` and the matching `.exc` files from `dir`.
    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let mut hasher = Sha256::new();
        let mut lemmas: [HashSet<String>; 4] = Default::default();
        let mut exceptions: [HashMap<String, Vec<String>>; 4] = Default::default();
        for pos in Pos::ALL {
            let stem = pos_file_stem(pos);
            let index = read(dir, &format!("index.{stem}"))?;
            let exc = read(dir, &format!("{stem}.exc"))?;
            hasher.update(index.as_bytes());
            hasher.update(exc.as_bytes());
            let slot = pos_index(pos);
            lemmas[slot] = index
                .lines()
                .filter(|line| !line.starts_with(' '))
                .filter_map(|line| line.split_whitespace().next())
                .map(str::to_owned)
                .collect();
            for line in exc.lines() {
                let mut fields = line.split_whitespace();
                if let Some(form) = fields.next() {
                    exceptions[slot].insert(form.to_owned(), fields.map(str::to_owned).collect());
                }
            }
        }
        if lemmas.iter().all(HashSet::is_empty) {
            return Err(Error::LexiconUnavailable {
                path: dir.to_owned(),
                reason: "index files contain no lemmas".into(),
            });
        }
        Ok(MorphyLexicon {
            lemmas,
            exceptions,
            checksum: hex(&hasher.finalize()),
            source: dir.to_owned(),
        })
    }

    /// SHA-256 over the index and exception files, for provenance records.
    pub fn checksum(&self) -> &str {
        &self.checksum
    }

    pub fn source(&self) -> &Path {
        &self.source
    }

    pub fn is_lemma(&self, word: &str, pos: Pos) -> bool {
        self.lemmas[pos_index(pos)].contains(word)
    }

    /// Lemma of `word` for `pos`; the word itself when WordNet knows no base form.
    pub fn lemmatize(&self, word: &str, pos: Pos) -> String {
        let slot = pos_index(pos);
        let forms: Vec<String> = match self.exceptions[slot].get(word) {
            Some(bases) => bases.clone(),
            None => substitutions(pos)
                .iter()
                .filter_map(|(old, new)| {
                    word.strip_suffix(old).map(|stem| format!("{stem}{new}"))
                })
                .collect(),
        };
        let mut seen = HashSet::new();
        std::iter::once(word.to_owned())
            .chain(forms)
            .filter(|form| self.lemmas[slot].contains(form) && seen.insert(form.clone()))
            .min_by_key(|form| form.chars().count())
            .unwrap_or_else(|| word.to_owned())
    }
}

fn read(dir: &Path, name: &str) -> Result<String> {
    let path = dir.join(name);
    fs::read_to_string(&path).map_err(|e| Error::LexiconUnavailable { path, reason: e.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_directory_is_reported() {
        match MorphyLexicon::load("/nonexistent/wordnet") {
            Err(Error::LexiconUnavailable { path, .. }) => {
                assert!(path.ends_with("index.noun"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
