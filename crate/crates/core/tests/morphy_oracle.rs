//! WordNet lemmatisation compared with reference outputs for every part of speech.

use ontoprep_core::textprep::{MorphyLexicon, Pos};

#[test]
fn lemmas_match_reference() {
    let lexicon = MorphyLexicon::load_bundled().unwrap();
    let text = include_str!("fixtures/morphy_oracle.tsv");
    let mut checked = 0;
    let mut bad = Vec::new();
    for line in text.lines().filter(|l| !l.starts_with('#') && !l.is_empty()) {
        let f: Vec<&str> = line.split('\t').collect();
        for (pos, expected) in [Pos::Noun, Pos::Verb, Pos::Adjective, Pos::Adverb].into_iter().zip(&f[1..]) {
            checked += 1;
            let got = lexicon.lemmatize(f[0], pos);
            if got != *expected {
                bad.push(format!("{} {pos:?} -> {got} (expected {expected})", f[0]));
            }
        }
    }
    assert!(checked > 4000);
    assert!(bad.is_empty(), "{} mismatches: {:?}", bad.len(), &bad[..bad.len().min(20)]);
}

#[test]
fn checksum_is_stable() {
    let a = MorphyLexicon::load_bundled().unwrap();
    assert_eq!(a.checksum().len(), 64);
    assert!(a.is_lemma("member", Pos::Noun));
    assert!(!a.is_lemma("members", Pos::Noun));
}
