//! Ontology ingestion: pulls classes, object properties and datatype
//! properties (with their labels) out of RDF/XML or Turtle documents.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use oxrdf::{NamedOrBlankNode, Term};
use oxrdfio::{RdfFormat, RdfParser};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{EntityKind, EntityRef, OntologyDoc};

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
const OWL_CLASS: &str = "http://www.w3.org/2002/07/owl#Class";
const OWL_OBJECT_PROPERTY: &str = "http://www.w3.org/2002/07/owl#ObjectProperty";
const OWL_DATATYPE_PROPERTY: &str = "http://www.w3.org/2002/07/owl#DatatypeProperty";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OntologyFormat {
    RdfXml,
    Turtle,
}

impl OntologyFormat {
    /// Guesses the format from a file extension (`.ttl` is Turtle, the usual
    /// RDF/XML extensions are RDF/XML).
    pub fn from_path(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "ttl" | "turtle" => Some(OntologyFormat::Turtle),
            "rdf" | "owl" | "xml" | "rdfxml" => Some(OntologyFormat::RdfXml),
            _ => None,
        }
    }
}

impl FromStr for OntologyFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rdfxml" | "rdf/xml" | "rdf" | "xml" | "owl" => Ok(OntologyFormat::RdfXml),
            "turtle" | "ttl" => Ok(OntologyFormat::Turtle),
            other => Err(Error::UnsupportedFormat(other.to_owned())),
        }
    }
}

impl fmt::Display for OntologyFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OntologyFormat::RdfXml => "rdfxml",
            OntologyFormat::Turtle => "turtle",
        })
    }
}

/// Which entity text the matcher sees.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LabelPolicy {
    /// Local name when it is textual, else the first label.
    #[default]
    NameThenLabel,
    /// First label when it is textual, else the local name.
    LabelThenName,
}

impl LabelPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            LabelPolicy::NameThenLabel => "name-first",
            LabelPolicy::LabelThenName => "label-first",
        }
    }
}

impl FromStr for LabelPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "name-first" | "name" => Ok(LabelPolicy::NameThenLabel),
            "label-first" | "label" => Ok(LabelPolicy::LabelThenName),
            other => Err(format!("unknown label policy `{other}`")),
        }
    }
}

impl fmt::Display for LabelPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Reads and parses an ontology file. The file URL is used as base IRI for
/// documents that rely on relative IRIs.
pub fn load_ontology(
    path: &Path,
    format: OntologyFormat,
    annotation_props: &[String],
) -> Result<OntologyDoc> {
    let bytes = std::fs::read(path)
        .map_err(|e| Error::io(format!("reading ontology {}", path.display()), e))?;
    let base = std::path::absolute(path)
        .ok()
        .map(|abs| format!("file://{}", abs.display()));
    let mut doc = parse_ontology_with_base(&bytes, format, annotation_props, base.as_deref())?;
    doc.source_path = path.display().to_string();
    Ok(doc)
}

pub fn parse_ontology(
    document: &[u8],
    format: OntologyFormat,
    annotation_props: &[String],
) -> Result<OntologyDoc> {
    parse_ontology_with_base(document, format, annotation_props, None)
}

pub fn parse_ontology_with_base(
    document: &[u8],
    format: OntologyFormat,
    annotation_props: &[String],
    base_iri: Option<&str>,
) -> Result<OntologyDoc> {
    let rdf_format = match format {
        OntologyFormat::RdfXml => RdfFormat::RdfXml,
        OntologyFormat::Turtle => RdfFormat::Turtle,
    };
    let mut parser = RdfParser::from_format(rdf_format);
    if let Some(base) = base_iri {
        parser = parser
            .with_base_iri(base)
            .map_err(|e| Error::malformed(format!("invalid base IRI `{base}`: {e}")))?;
    }

    // Declarations in document order; the first owl type seen for a subject wins.
    let mut declared: Vec<(String, EntityKind)> = Vec::new();
    let mut kinds: HashMap<String, EntityKind> = HashMap::new();
    let mut labels: HashMap<String, Vec<(String, Option<String>)>> = HashMap::new();

    for quad in parser.for_slice(document) {
        let quad = quad.map_err(|e| syntax_error(document, format, &e))?;
        let NamedOrBlankNode::NamedNode(subject) = &quad.subject else {
            continue;
        };
        let predicate = quad.predicate.as_str();
        if predicate == RDF_TYPE {
            let Term::NamedNode(class) = &quad.object else { continue };
            let kind = match class.as_str() {
                OWL_CLASS => EntityKind::Class,
                OWL_OBJECT_PROPERTY => EntityKind::ObjectProperty,
                OWL_DATATYPE_PROPERTY => EntityKind::DatatypeProperty,
                _ => continue,
            };
            if !kinds.contains_key(subject.as_str()) {
                kinds.insert(subject.as_str().to_owned(), kind);
                declared.push((subject.as_str().to_owned(), kind));
            }
        } else if predicate == RDFS_LABEL || annotation_props.iter().any(|p| p == predicate) {
            if let Term::Literal(literal) = &quad.object {
                let value = literal.value().trim();
                if !value.is_empty() {
                    labels
                        .entry(subject.as_str().to_owned())
                        .or_default()
                        .push((value.to_owned(), literal.language().map(str::to_owned)));
                }
            }
        }
    }

    let mut doc = OntologyDoc::new("");
    for (iri, kind) in declared {
        let mut entity = EntityRef::new(iri, kind);
        if let Some(found) = labels.remove(&entity.iri) {
            entity.labels = order_labels(found);
        }
        doc.push(entity)?;
    }
    Ok(doc)
}

/// Untagged and English labels first (document order kept within each group).
fn order_labels(found: Vec<(String, Option<String>)>) -> Vec<String> {
    let is_preferred = |lang: &Option<String>| match lang {
        None => true,
        Some(tag) => {
            let tag = tag.to_ascii_lowercase();
            tag == "en" || tag.starts_with("en-")
        }
    };
    let (preferred, other): (Vec<_>, Vec<_>) =
        found.into_iter().partition(|(_, lang)| is_preferred(lang));
    preferred.into_iter().chain(other).map(|(value, _)| value).collect()
}

fn syntax_error(document: &[u8], format: OntologyFormat, err: &oxrdfio::RdfSyntaxError) -> Error {
    if let Some(range) = err.location() {
        return Error::MalformedDocument {
            message: err.to_string(),
            line: Some(range.start.line + 1),
            column: Some(range.start.column + 1),
        };
    }
    let (line, column) = match format {
        OntologyFormat::RdfXml => xml_error_position(document).unzip(),
        OntologyFormat::Turtle => (None, None),
    };
    Error::MalformedDocument { message: err.to_string(), line, column }
}

/// The RDF/XML parser reports no positions, so re-scan the document with a
/// plain XML reader to locate the first well-formedness error, if any.
fn xml_error_position(document: &[u8]) -> Option<(u64, u64)> {
    let mut reader = quick_xml::Reader::from_reader(document);
    reader.config_mut().check_end_names = true;
    let mut buf = Vec::new();
    loop {
        match reader.read_event_into(&mut buf) {
            Ok(quick_xml::events::Event::Eof) => return None,
            Ok(_) => buf.clear(),
            Err(_) => {
                let offset = (reader.error_position() as usize).min(document.len());
                return Some(line_column(document, offset));
            }
        }
    }
}

fn line_column(document: &[u8], offset: usize) -> (u64, u64) {
    let before = &document[..offset];
    let line = before.iter().filter(|&&b| b == b'\n').count() as u64 + 1;
    let line_start = before.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1);
    let column = String::from_utf8_lossy(&before[line_start..]).chars().count() as u64 + 1;
    (line, column)
}

/// A name or label is textual when it carries more letters than digits, so
/// identifier codes such as `C12345` or `FMA_7203` are not treated as text.
pub fn is_textual(text: &str) -> bool {
    let letters = text.chars().filter(|c| c.is_alphabetic()).count();
    let digits = text.chars().filter(|c| c.is_numeric()).count();
    letters > 0 && letters > digits
}

/// The string handed to the preprocessing pipeline for `entity`. Empty when
/// the entity has no usable text.
pub fn display_text(entity: &EntityRef, policy: LabelPolicy) -> &str {
    let first_label = entity.labels.first().map(String::as_str).unwrap_or("");
    let (primary, fallback) = match policy {
        LabelPolicy::NameThenLabel => (entity.local_name.as_str(), first_label),
        LabelPolicy::LabelThenName => (first_label, entity.local_name.as_str()),
    };
    if is_textual(primary) {
        primary
    } else {
        fallback
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = r#"<?xml version="1.0"?>
<rdf:RDF xmlns:rdf="http://www.w3.org/1999/02/22-rdf-syntax-ns#"
         xmlns:rdfs="http://www.w3.org/2000/01/rdf-schema#"
         xmlns:owl="http://www.w3.org/2002/07/owl#"
         xmlns:skos="http://www.w3.org/2004/02/skos/core#"
         xml:base="http://example.org/onto">
"#;

    fn rdfxml(body: &str) -> Vec<u8> {
        format!("{HEADER}{body}\n</rdf:RDF>\n").into_bytes()
    }

    #[test]
    fn class_without_label() {
        let doc = parse_ontology(
            &rdfxml(r#"<owl:Class rdf:about="http://example.org/onto#ArtGallery"/>"#),
            OntologyFormat::RdfXml,
            &[],
        )
        .unwrap();
        assert_eq!(doc.len(), 1);
        let e = &doc.entities()[0];
        assert_eq!(e.kind, EntityKind::Class);
        assert_eq!(e.local_name, "ArtGallery");
        assert!(e.labels.is_empty());
    }

    #[test]
    fn object_property() {
        let doc = parse_ontology(
            &rdfxml(r#"<owl:ObjectProperty rdf:about="http://example.org/onto#isReviewing"/>"#),
            OntologyFormat::RdfXml,
            &[],
        )
        .unwrap();
        assert_eq!(doc.entities()[0].kind, EntityKind::ObjectProperty);
        assert_eq!(doc.entities()[0].local_name, "isReviewing");
    }

    #[test]
    fn coded_class_keeps_label() {
        let doc = parse_ontology(
            &rdfxml(
                r#"<owl:Class rdf:about="http://example.org/onto#C12345"><rdfs:label>Heart</rdfs:label></owl:Class>"#,
            ),
            OntologyFormat::RdfXml,
            &[],
        )
        .unwrap();
        let e = &doc.entities()[0];
        assert_eq!(e.local_name, "C12345");
        assert_eq!(e.labels, vec!["Heart"]);
        assert_eq!(display_text(e, LabelPolicy::NameThenLabel), "Heart");
    }

    #[test]
    fn relative_iris_resolve_against_xml_base() {
        let doc = parse_ontology(
            &rdfxml(r##"<owl:Class rdf:about="#Paper"/><owl:DatatypeProperty rdf:ID="title"/>"##),
            OntologyFormat::RdfXml,
            &[],
        )
        .unwrap();
        let iris: Vec<_> = doc.entities().iter().map(|e| e.iri.as_str()).collect();
        assert_eq!(iris, vec!["http://example.org/onto#Paper", "http://example.org/onto#title"]);
        assert_eq!(doc.entities()[1].kind, EntityKind::DatatypeProperty);
    }

    #[test]
    fn turtle_with_annotation_property_and_languages() {
        let ttl = br#"
@prefix owl: <http://www.w3.org/2002/07/owl#> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
@prefix skos: <http://www.w3.org/2004/02/skos/core#> .
@prefix : <http://example.org/o#> .
:Heart a owl:Class ; rdfs:label "Herz"@de , "Heart"@en ; skos:prefLabel "Cardiac organ" .
:hasPart a owl:ObjectProperty .
:weight a owl:DatatypeProperty .
:Thing a owl:NamedIndividual .
_:b0 a owl:Class .
"#;
        let props = vec!["http://www.w3.org/2004/02/skos/core#prefLabel".to_owned()];
        let doc = parse_ontology(ttl, OntologyFormat::Turtle, &props).unwrap();
        assert_eq!(doc.len(), 3);
        assert_eq!(doc.entities()[0].labels, vec!["Heart", "Cardiac organ", "Herz"]);
        assert_eq!(doc.entities()[1].kind, EntityKind::ObjectProperty);
        assert_eq!(doc.entities()[2].kind, EntityKind::DatatypeProperty);
        let without = parse_ontology(ttl, OntologyFormat::Turtle, &[]).unwrap();
        assert_eq!(without.entities()[0].labels, vec!["Heart", "Herz"]);
    }

    #[test]
    fn first_declared_kind_wins() {
        let ttl = br#"
@prefix owl: <http://www.w3.org/2002/07/owl#> .
<http://e/x#A> a owl:ObjectProperty .
<http://e/x#A> a owl:Class .
"#;
        let doc = parse_ontology(ttl, OntologyFormat::Turtle, &[]).unwrap();
        assert_eq!(doc.len(), 1);
        assert_eq!(doc.entities()[0].kind, EntityKind::ObjectProperty);
    }

    #[test]
    fn turtle_syntax_error_has_position() {
        let err = parse_ontology(b"@prefix : <http://e/> .\n:a :b", OntologyFormat::Turtle, &[])
            .unwrap_err();
        match err {
            Error::MalformedDocument { line, column, .. } => {
                assert_eq!(line, Some(2));
                assert!(column.is_some());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rdfxml_syntax_error_has_position() {
        let bad = b"<?xml version=\"1.0\"?>\n<rdf:RDF xmlns:rdf=\"http://www.w3.org/1999/02/22-rdf-syntax-ns#\">\n<rdf:Description></rdf:Foo>\n</rdf:RDF>";
        match parse_ontology(bad, OntologyFormat::RdfXml, &[]).unwrap_err() {
            Error::MalformedDocument { line, .. } => assert_eq!(line, Some(3)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_format_string() {
        assert!(matches!("jsonld".parse::<OntologyFormat>(), Err(Error::UnsupportedFormat(_))));
        assert_eq!("ttl".parse::<OntologyFormat>().unwrap(), OntologyFormat::Turtle);
    }

    #[test]
    fn display_text_policies() {
        let named = EntityRef::new("http://e#isReviewing", EntityKind::ObjectProperty);
        assert_eq!(display_text(&named, LabelPolicy::NameThenLabel), "isReviewing");
        let empty = EntityRef::new("http://e#", EntityKind::Class);
        assert_eq!(display_text(&empty, LabelPolicy::NameThenLabel), "");
        assert_eq!(display_text(&empty, LabelPolicy::LabelThenName), "");
        let labelled = EntityRef::new("http://e#Heart_organ", EntityKind::Class).with_labels(["Heart"]);
        assert_eq!(display_text(&labelled, LabelPolicy::NameThenLabel), "Heart_organ");
        assert_eq!(display_text(&labelled, LabelPolicy::LabelThenName), "Heart");
        let coded = EntityRef::new("http://e#C12345", EntityKind::Class);
        assert_eq!(display_text(&coded, LabelPolicy::NameThenLabel), "");
        assert_eq!(display_text(&coded, LabelPolicy::LabelThenName), "C12345");
    }

    #[test]
    fn textual_rule() {
        assert!(is_textual("Chromosome_Y"));
        assert!(is_textual("Area51"));
        assert!(!is_textual("C12345"));
        assert!(!is_textual("FMA_7203"));
        assert!(!is_textual("12"));
        assert!(!is_textual(""));
    }
}
