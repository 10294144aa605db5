//! Exact matching on canonical keys within entity categories.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::model::{Alignment, Category, Correspondence, EntityRef, OntologyDoc};
use crate::ontology::{display_text, LabelPolicy};
use crate::textprep::{CanonicalKey, Pipeline, ReservedWordSet};

/// Entities grouped by `(key, category)`.
#[derive(Debug, Clone, Default)]
pub struct CanonicalIndex<'a> {
    buckets: HashMap<(CanonicalKey, Category), Vec<&'a EntityRef>>,
    skipped: usize,
}

impl<'a> CanonicalIndex<'a> {
    pub fn get(&self, key: &CanonicalKey, category: Category) -> &[&'a EntityRef] {
        self.buckets.get(&(key.clone(), category)).map(Vec::as_slice).unwrap_or_default()
    }

    /// Buckets in deterministic (key, category) order.
    pub fn buckets(&self) -> Vec<(&CanonicalKey, Category, &[&'a EntityRef])> {
        let sorted: BTreeMap<_, _> = self.buckets.iter().map(|((k, c), v)| ((k, *c), v)).collect();
        sorted.into_iter().map(|((k, c), v)| (k, c, v.as_slice())).collect()
    }

    pub fn bucket_count(&self) -> usize {
        self.buckets.len()
    }

    pub fn entity_count(&self) -> usize {
        self.buckets.values().map(Vec::len).sum()
    }

    /// Entities left out because their text or key was empty.
    pub fn skipped(&self) -> usize {
        self.skipped
    }

    pub fn is_empty(&self) -> bool {
        self.buckets.is_empty()
    }
}

/// Canonical key of every entity, in document order; `None` for entities
/// without text or with an empty key.
pub fn entity_keys(
    ontology: &OntologyDoc,
    pipeline: &Pipeline,
    reserved: Option<&ReservedWordSet>,
    policy: LabelPolicy,
) -> Vec<Option<CanonicalKey>> {
    ontology
        .entities()
        .par_iter()
        .map(|entity| {
            let text = display_text(entity, policy);
            if text.is_empty() {
                return None;
            }
            let key = pipeline.apply(text, reserved);
            (!key.is_empty()).then_some(key)
        })
        .collect()
}

pub fn canonical_index<'a>(
    ontology: &'a OntologyDoc,
    pipeline: &Pipeline,
    reserved: Option<&ReservedWordSet>,
    policy: LabelPolicy,
) -> CanonicalIndex<'a> {
    let keys = entity_keys(ontology, pipeline, reserved, policy);
    let mut index = CanonicalIndex::default();
    for (entity, key) in ontology.entities().iter().zip(keys) {
        match key {
            Some(key) => index.buckets.entry((key, entity.category())).or_default().push(entity),
            None => index.skipped += 1,
        }
    }
    index
}

/// Every source/target pair whose keys and categories coincide, as
/// confidence-1.0 equivalences.
pub fn match_ontologies(
    source: &OntologyDoc,
    target: &OntologyDoc,
    pipeline: &Pipeline,
    reserved: Option<&ReservedWordSet>,
    policy: LabelPolicy,
) -> Alignment {
    let source_index = canonical_index(source, pipeline, reserved, policy);
    let target_index = canonical_index(target, pipeline, reserved, policy);
    join(&source_index, &target_index, source, target, pipeline)
}

pub(crate) fn join(
    source_index: &CanonicalIndex<'_>,
    target_index: &CanonicalIndex<'_>,
    source: &OntologyDoc,
    target: &OntologyDoc,
    pipeline: &Pipeline,
) -> Alignment {
    let cells: Vec<Correspondence> = source_index
        .buckets
        .par_iter()
        .flat_map_iter(|(bucket, left)| {
            let right = target_index.buckets.get(bucket).map(Vec::as_slice).unwrap_or_default();
            left.iter().flat_map(move |s| {
                right.iter().map(move |t| Correspondence::exact(&s.iri, &t.iri))
            })
        })
        .collect();
    let mut alignment = Alignment::new(&source.source_path, &target.source_path)
        .with_provenance(format!("syntactic-match pipeline={}", pipeline.id()));
    alignment.extend(cells);
    alignment
}
