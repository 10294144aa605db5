//! Random synthetic ontologies whose names are built from a small, collision
//! prone vocabulary (inflections, stop words, case and separator variants).
#![allow(dead_code)]

use std::collections::BTreeSet;

use ontoprep_core::ontology::{display_text, LabelPolicy};
use ontoprep_core::textprep::{Pipeline, ReservedWordSet};
use ontoprep_core::{Alignment, Correspondence, EntityKind, EntityRef, OntologyDoc};
use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};

pub const WORDS: &[&str] = &[
    "is", "was", "has", "a", "of", "the", "and", "by", "review", "reviews", "reviewing",
    "reviewed", "reviewer", "paper", "papers", "member", "members", "run", "running", "runs",
    "author", "authors", "accept", "accepted", "acceptance", "committee", "committees",
    "steering", "steer", "chair", "chairs", "write", "writes", "written", "conference",
    "event", "events", "person", "people", "organization", "organisation", "general", "x",
];

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

fn styled(words: &[&str], style: usize) -> String {
    let cap = |w: &str| {
        let mut c = w.chars();
        c.next().map(|f| f.to_uppercase().chain(c).collect::<String>()).unwrap_or_default()
    };
    match style {
        0 => words.join("_"),
        1 => words.iter().enumerate().map(|(i, w)| if i == 0 { w.to_string() } else { cap(w) }).collect(),
        2 => words.iter().map(|w| cap(w)).collect(),
        3 => words.join(" "),
        _ => words.iter().map(|w| cap(w)).collect::<Vec<_>>().join("-"),
    }
}

pub fn random_name(rng: &mut StdRng) -> String {
    let len = rng.random_range(1..=4);
    let words: Vec<&str> = (0..len).map(|_| *WORDS.choose(rng).unwrap()).collect();
    styled(&words, rng.random_range(0..5))
}

/// Up to `max` entities; some carry their text as a label behind a numeric code.
pub fn random_ontology(rng: &mut StdRng, max: usize, tag: &str) -> OntologyDoc {
    let n = rng.random_range(0..=max);
    let mut doc = OntologyDoc::new(format!("mem:{tag}"));
    for i in 0..n {
        let kind = match rng.random_range(0..3) {
            0 => EntityKind::Class,
            1 => EntityKind::ObjectProperty,
            _ => EntityKind::DatatypeProperty,
        };
        let text = random_name(rng);
        let entity = if rng.random_bool(0.2) {
            EntityRef::new(format!("http://{tag}.test/onto#C{i:05}"), kind).with_labels([text])
        } else {
            let local = text.replace(' ', "_");
            EntityRef::new(format!("http://{tag}.test/onto/{i}/{local}"), kind)
        };
        doc.push(entity).unwrap();
    }
    doc
}

/// All-pairs comparison of keys within categories.
pub fn brute_force_match(
    source: &OntologyDoc,
    target: &OntologyDoc,
    pipeline: &Pipeline,
    reserved: Option<&ReservedWordSet>,
    policy: LabelPolicy,
) -> BTreeSet<(String, String)> {
    let mut out = BTreeSet::new();
    for s in source.entities() {
        for t in target.entities() {
            if s.category() != t.category() {
                continue;
            }
            let (ts, tt) = (display_text(s, policy), display_text(t, policy));
            if ts.is_empty() || tt.is_empty() {
                continue;
            }
            let (ks, kt) = (pipeline.apply(ts, reserved), pipeline.apply(tt, reserved));
            if !ks.is_empty() && ks == kt {
                out.insert((s.iri.clone(), t.iri.clone()));
            }
        }
    }
    out
}

pub fn pairs(alignment: &Alignment) -> BTreeSet<(String, String)> {
    alignment.cells().map(|c| (c.entity1.clone(), c.entity2.clone())).collect()
}

/// Within-ontology pairs that collide under the pipeline but differ after
/// tokenisation and normalisation.
pub fn colliding_pairs(doc: &OntologyDoc, pipeline: &Pipeline, policy: LabelPolicy) -> Vec<(String, String)> {
    let entities = doc.entities();
    let mut out = Vec::new();
    for (i, a) in entities.iter().enumerate() {
        for b in &entities[i + 1..] {
            if a.category() != b.category() {
                continue;
            }
            let (ta, tb) = (display_text(a, policy), display_text(b, policy));
            if ta.is_empty() || tb.is_empty() {
                continue;
            }
            let ka = pipeline.apply(ta, None);
            if !ka.is_empty() && ka == pipeline.apply(tb, None) && pipeline.phase1(ta) != pipeline.phase1(tb) {
                out.push((ta.to_owned(), tb.to_owned()));
            }
        }
    }
    out
}

pub fn alignment_from(pairs: &[(&str, &str)]) -> Alignment {
    let mut a = Alignment::new("s", "t");
    a.extend(pairs.iter().map(|(x, y)| Correspondence::exact(*x, *y)));
    a
}
