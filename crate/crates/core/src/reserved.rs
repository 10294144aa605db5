//! Reserved-word discovery: words that must survive preprocessing verbatim so
//! that distinct entities of one ontology keep distinct keys.
//!
//! Phase 1 scans every pair of entities that share a key and a category but
//! differ after tokenisation and normalisation, and collects the tokens that
//! tell them apart. Phase 2 drops words the word-level steps leave unchanged,
//! since reserving them has no effect.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Category, OntologyDoc};
use crate::ontology::{display_text, LabelPolicy};
use crate::textprep::{CanonicalKey, Pipeline, ReservedWordSet, TokenSeq};

struct Prepared {
    category: Category,
    key: CanonicalKey,
    phase1: TokenSeq,
    text: String,
}

/// Entity pairs that collide under the pipeline but differ after phase 1.
struct Collisions {
    entities: Vec<Prepared>,
    pairs: Vec<(usize, usize)>,
}

fn collisions(ontology: &OntologyDoc, pipeline: &Pipeline, policy: LabelPolicy) -> Collisions {
    let entities: Vec<Prepared> = ontology
        .entities()
        .par_iter()
        .filter_map(|entity| {
            let text = display_text(entity, policy);
            if text.is_empty() {
                return None;
            }
            let key = pipeline.apply(text, None);
            if key.is_empty() {
                return None;
            }
            Some(Prepared {
                category: entity.category(),
                key,
                phase1: pipeline.phase1(text),
                text: text.to_owned(),
            })
        })
        .collect();
    let mut buckets: BTreeMap<(Category, &CanonicalKey), Vec<usize>> = BTreeMap::new();
    for (i, e) in entities.iter().enumerate() {
        buckets.entry((e.category, &e.key)).or_default().push(i);
    }
    let pairs = buckets
        .values()
        .filter(|members| members.len() > 1)
        .flat_map(|members| {
            let entities = &entities;
            members.iter().enumerate().flat_map(move |(n, &i)| {
                members[n + 1..]
                    .iter()
                    .filter(move |&&j| entities[i].phase1 != entities[j].phase1)
                    .map(move |&j| (i, j))
            })
        })
        .collect();
    Collisions { entities, pairs }
}

fn counts(tokens: &TokenSeq) -> BTreeMap<&str, usize> {
    let mut counts = BTreeMap::new();
    for t in tokens {
        *counts.entry(t.as_str()).or_default() += 1;
    }
    counts
}

/// Words occurring a different number of times in the two sequences.
pub fn multiset_symmetric_difference<'a>(a: &'a TokenSeq, b: &'a TokenSeq) -> BTreeSet<&'a str> {
    let (ca, cb) = (counts(a), counts(b));
    ca.keys()
        .chain(cb.keys())
        .filter(|w| ca.get(*w) != cb.get(*w))
        .copied()
        .collect()
}

fn check_pipeline(pipeline: &Pipeline) -> Result<()> {
    if pipeline.config().supports_reserved_words() {
        Ok(())
    } else {
        Err(Error::InvalidPipeline(
            "reserved-word discovery needs a pipeline with tokenise and normalise".into(),
        ))
    }
}

/// Reserved words of one ontology.
///
/// When the empty-result guard of stop-word removal keeps a colliding pair
/// together even with the phase-2 set applied, every mutable token of that
/// pair is added until no such pair collides.
pub fn find_reserved_word_set(
    ontology: &OntologyDoc,
    pipeline: &Pipeline,
    policy: LabelPolicy,
) -> Result<ReservedWordSet> {
    check_pipeline(pipeline)?;
    let Collisions { entities, pairs } = collisions(ontology, pipeline, policy);

    let mut candidates: BTreeSet<&str> = BTreeSet::new();
    for &(i, j) in &pairs {
        let (a, b) = (&entities[i].phase1, &entities[j].phase1);
        let diff = multiset_symmetric_difference(a, b);
        if diff.is_empty() {
            candidates.extend(a.iter().chain(b).map(String::as_str));
        } else {
            candidates.extend(diff);
        }
    }
    let mut reserved: ReservedWordSet =
        candidates.into_iter().filter(|w| !pipeline.is_immutable(w)).collect();

    loop {
        let mut grew = false;
        for &(i, j) in &pairs {
            let (a, b) = (&entities[i], &entities[j]);
            if pipeline.apply(&a.text, Some(&reserved)) != pipeline.apply(&b.text, Some(&reserved)) {
                continue;
            }
            for word in a.phase1.iter().chain(&b.phase1) {
                if !pipeline.is_immutable(word) {
                    grew |= reserved.insert(word);
                }
            }
        }
        if !grew {
            return Ok(reserved);
        }
    }
}

/// Union of the per-ontology sets; pairs across the two ontologies are never compared.
pub fn build_joint_reserved_set(
    source: &OntologyDoc,
    target: &OntologyDoc,
    pipeline: &Pipeline,
    policy: LabelPolicy,
) -> Result<ReservedWordSet> {
    let s = find_reserved_word_set(source, pipeline, policy)?;
    let t = find_reserved_word_set(target, pipeline, policy)?;
    Ok(s.union(&t))
}
