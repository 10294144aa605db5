//! Domain model shared by every stage: entities, ontologies, correspondences
//! and alignments.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The three OWL entity types that take part in matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EntityKind {
    Class,
    ObjectProperty,
    DatatypeProperty,
}

impl EntityKind {
    pub fn category(self) -> Category {
        match self {
            EntityKind::Class => Category::Class,
            EntityKind::ObjectProperty | EntityKind::DatatypeProperty => Category::Property,
        }
    }
}

/// Matching compatibility class. Object and datatype properties share one
/// category; classes only ever match classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    Class,
    Property,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityRef {
    pub iri: String,
    pub kind: EntityKind,
    /// IRI fragment, or the last path segment when there is no fragment.
    pub local_name: String,
    pub labels: Vec<String>,
}

impl EntityRef {
    pub fn new(iri: impl Into<String>, kind: EntityKind) -> Self {
        let iri = iri.into();
        let local_name = local_name(&iri).to_owned();
        EntityRef { iri, kind, local_name, labels: Vec::new() }
    }

    pub fn with_labels<I, S>(mut self, labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.labels = labels.into_iter().map(Into::into).collect();
        self
    }

    pub fn category(&self) -> Category {
        self.kind.category()
    }
}

/// Substring after `#`, else after the last `/`, else the whole IRI.
pub fn local_name(iri: &str) -> &str {
    if let Some(pos) = iri.rfind('#') {
        return &iri[pos + 1..];
    }
    let trimmed = iri.trim_end_matches('/');
    match trimmed.rfind('/') {
        Some(pos) => &trimmed[pos + 1..],
        None => trimmed,
    }
}

/// An ontology reduced to the entities the matcher looks at.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct OntologyDoc {
    pub source_path: String,
    entities: Vec<EntityRef>,
    #[serde(skip)]
    by_iri: HashMap<String, usize>,
}

impl PartialEq for OntologyDoc {
    fn eq(&self, other: &Self) -> bool {
        self.source_path == other.source_path && self.entities == other.entities
    }
}

impl OntologyDoc {
    pub fn new(source_path: impl Into<String>) -> Self {
        OntologyDoc { source_path: source_path.into(), ..Default::default() }
    }

    /// Builds a document from a list of entities, rejecting duplicate or empty IRIs.
    pub fn from_entities(
        source_path: impl Into<String>,
        entities: impl IntoIterator<Item = EntityRef>,
    ) -> Result<Self> {
        let mut doc = OntologyDoc::new(source_path);
        for entity in entities {
            doc.push(entity)?;
        }
        Ok(doc)
    }

    pub fn push(&mut self, entity: EntityRef) -> Result<()> {
        if entity.iri.is_empty() {
            return Err(Error::malformed("entity with an empty IRI"));
        }
        if self.by_iri.contains_key(&entity.iri) {
            return Err(Error::malformed(format!("duplicate entity IRI `{}`", entity.iri)));
        }
        self.by_iri.insert(entity.iri.clone(), self.entities.len());
        self.entities.push(entity);
        Ok(())
    }

    pub fn entities(&self) -> &[EntityRef] {
        &self.entities
    }

    pub fn get(&self, iri: &str) -> Option<&EntityRef> {
        self.by_iri.get(iri).map(|&idx| &self.entities[idx])
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }
}

/// Only equivalence mappings are represented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Relation {
    #[default]
    Equivalence,
}

impl Relation {
    pub fn parse(raw: &str) -> Result<Self> {
        match raw.trim() {
            "=" => Ok(Relation::Equivalence),
            other => Err(Error::UnsupportedRelation(other.to_owned())),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Equivalence => "=",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correspondence {
    pub entity1: String,
    pub entity2: String,
    pub relation: Relation,
    pub confidence: f64,
}

impl Correspondence {
    pub fn new(
        entity1: impl Into<String>,
        entity2: impl Into<String>,
        confidence: f64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&confidence) {
            return Err(Error::InvalidAlignment(format!(
                "confidence {confidence} is outside [0, 1]"
            )));
        }
        Ok(Correspondence {
            entity1: entity1.into(),
            entity2: entity2.into(),
            relation: Relation::Equivalence,
            confidence,
        })
    }

    /// Confidence 1.0 equivalence.
    pub fn exact(entity1: impl Into<String>, entity2: impl Into<String>) -> Self {
        Correspondence {
            entity1: entity1.into(),
            entity2: entity2.into(),
            relation: Relation::Equivalence,
            confidence: 1.0,
        }
    }

    pub fn pair(&self) -> (&str, &str) {
        (&self.entity1, &self.entity2)
    }
}

/// A set of correspondences keyed by `(entity1, entity2)`; iteration order is
/// always lexicographic on that pair.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Alignment {
    pub source_ontology: String,
    pub target_ontology: String,
    pub provenance: String,
    cells: BTreeMap<(String, String), Correspondence>,
}

impl Alignment {
    pub fn new(source_ontology: impl Into<String>, target_ontology: impl Into<String>) -> Self {
        Alignment {
            source_ontology: source_ontology.into(),
            target_ontology: target_ontology.into(),
            ..Default::default()
        }
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    /// Inserts a cell. Returns `false` (and keeps the existing cell) when the
    /// pair is already present.
    pub fn insert(&mut self, cell: Correspondence) -> bool {
        let key = (cell.entity1.clone(), cell.entity2.clone());
        if self.cells.contains_key(&key) {
            return false;
        }
        self.cells.insert(key, cell);
        true
    }

    pub fn cells(&self) -> impl ExactSizeIterator<Item = &Correspondence> + '_ {
        self.cells.values()
    }

    pub fn contains_pair(&self, entity1: &str, entity2: &str) -> bool {
        self.cells.contains_key(&(entity1.to_owned(), entity2.to_owned()))
    }

    pub fn get(&self, entity1: &str, entity2: &str) -> Option<&Correspondence> {
        self.cells.get(&(entity1.to_owned(), entity2.to_owned()))
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn retain(&mut self, mut keep: impl FnMut(&Correspondence) -> bool) {
        self.cells.retain(|_, cell| keep(cell));
    }

    /// Every pair of `self` is also a pair of `other` (confidence ignored).
    pub fn is_subset_of(&self, other: &Alignment) -> bool {
        self.cells.keys().all(|key| other.cells.contains_key(key))
    }

    /// Same alignment with entity1 and entity2 swapped in every cell.
    pub fn transposed(&self) -> Alignment {
        let mut out = Alignment::new(&self.target_ontology, &self.source_ontology)
            .with_provenance(&self.provenance);
        for cell in self.cells() {
            out.insert(Correspondence {
                entity1: cell.entity2.clone(),
                entity2: cell.entity1.clone(),
                relation: cell.relation,
                confidence: cell.confidence,
            });
        }
        out
    }
}

impl Extend<Correspondence> for Alignment {
    fn extend<T: IntoIterator<Item = Correspondence>>(&mut self, iter: T) {
        for cell in iter {
            self.insert(cell);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn local_name_prefers_fragment() {
        assert_eq!(local_name("http://ex.org/conf#ArtGallery"), "ArtGallery");
        assert_eq!(local_name("http://ex.org/conf/ArtGallery"), "ArtGallery");
        assert_eq!(local_name("http://ex.org/conf/ArtGallery/"), "ArtGallery");
        assert_eq!(local_name("http://ex.org/a/b#"), "");
        assert_eq!(local_name("urn:x"), "urn:x");
    }

    #[test]
    fn duplicate_iri_rejected() {
        let mut doc = OntologyDoc::new("x");
        doc.push(EntityRef::new("http://a#X", EntityKind::Class)).unwrap();
        assert!(doc.push(EntityRef::new("http://a#X", EntityKind::ObjectProperty)).is_err());
        assert!(doc.push(EntityRef::new("", EntityKind::Class)).is_err());
        assert_eq!(doc.len(), 1);
    }

    #[test]
    fn property_kinds_share_a_category() {
        assert_eq!(EntityKind::ObjectProperty.category(), Category::Property);
        assert_eq!(EntityKind::DatatypeProperty.category(), Category::Property);
        assert_eq!(EntityKind::Class.category(), Category::Class);
    }

    #[test]
    fn confidence_out_of_range() {
        assert!(Correspondence::new("a", "b", 1.5).is_err());
        assert!(Correspondence::new("a", "b", -0.1).is_err());
        assert!(Correspondence::new("a", "b", f64::NAN).is_err());
        assert!(Correspondence::new("a", "b", 0.0).is_ok());
    }

    #[test]
    fn alignment_dedups_and_sorts() {
        let mut a = Alignment::new("s", "t");
        assert!(a.insert(Correspondence::exact("b", "y")));
        assert!(a.insert(Correspondence::exact("a", "z")));
        assert!(!a.insert(Correspondence::exact("b", "y")));
        let pairs: Vec<_> = a.cells().map(|c| c.pair()).collect();
        assert_eq!(pairs, vec![("a", "z"), ("b", "y")]);
        assert_eq!(a.transposed().cells().next().unwrap().pair(), ("y", "b"));
    }

    #[test]
    fn relation_parse() {
        assert_eq!(Relation::parse(" = ").unwrap(), Relation::Equivalence);
        match Relation::parse("<") {
            Err(Error::UnsupportedRelation(r)) => assert_eq!(r, "<"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
