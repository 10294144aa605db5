use std::path::PathBuf;

use ontoprep_core::alignment_format::{load_alignment, read_alignment, save_alignment, write_alignment};
use ontoprep_core::matcher::match_ontologies;
use ontoprep_core::metrics::evaluate;
use ontoprep_core::ontology::{display_text, load_ontology, LabelPolicy, OntologyFormat};
use ontoprep_core::textprep::{Pipeline, PipelineConfig};
use ontoprep_core::EntityKind;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/ontologies").join(name)
}

fn pipeline(spec: &str) -> Pipeline {
    Pipeline::new(PipelineConfig::parse(spec).unwrap(), None).unwrap()
}

#[test]
fn rdfxml_and_turtle_agree() {
    let xml = load_ontology(&fixture("reviewing.rdf"), OntologyFormat::RdfXml, &[]).unwrap();
    let ttl = load_ontology(&fixture("reviewing.ttl"), OntologyFormat::Turtle, &[]).unwrap();
    assert_eq!(xml.entities(), ttl.entities());
    assert_eq!(xml.len(), 5);
    let reviewer = xml.get("http://example.org/right#C0042").unwrap();
    assert_eq!(reviewer.kind, EntityKind::Class);
    assert_eq!(reviewer.labels, ["Reviewer", "Gutachter"]);
    assert_eq!(display_text(reviewer, LabelPolicy::NameThenLabel), "Reviewer");
}

#[test]
fn format_from_extension() {
    assert_eq!(OntologyFormat::from_path(&fixture("a.ttl")), Some(OntologyFormat::Turtle));
    assert_eq!(OntologyFormat::from_path(&fixture("a.owl")), Some(OntologyFormat::RdfXml));
}

#[test]
fn parse_is_deterministic() {
    let a = load_ontology(&fixture("reviews.rdf"), OntologyFormat::RdfXml, &[]).unwrap();
    let b = load_ontology(&fixture("reviews.rdf"), OntologyFormat::RdfXml, &[]).unwrap();
    assert_eq!(a, b);
    let names: Vec<&str> = a.entities().iter().map(|e| e.local_name.as_str()).collect();
    assert_eq!(names, ["Paper", "Reviewer", "reviews", "hasTitle"]);
}

#[test]
fn end_to_end_match_and_score() {
    let s = load_ontology(&fixture("reviews.rdf"), OntologyFormat::RdfXml, &[]).unwrap();
    let t = load_ontology(&fixture("reviewing.rdf"), OntologyFormat::RdfXml, &[]).unwrap();
    let reference = load_alignment(&fixture("reference.rdf")).unwrap();
    assert_eq!(reference.len(), 4);

    let tn = match_ontologies(&s, &t, &pipeline("T,N"), None, LabelPolicy::NameThenLabel);
    let full = match_ontologies(&s, &t, &pipeline("T,N,R,S:porter"), None, LabelPolicy::NameThenLabel);
    assert!(tn.is_subset_of(&full));
    assert!(full.contains_pair("http://example.org/left#reviews", "http://example.org/right#isReviewing"));
    assert!(full.contains_pair("http://example.org/left#reviews", "http://example.org/right#isReviewedBy"));

    let report = evaluate(&full, &reference);
    assert_eq!((report.tp, report.fp, report.fn_), (4, 1, 0));

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nested/out.rdf");
    save_alignment(&out, &full).unwrap();
    let back = load_alignment(&out).unwrap();
    assert_eq!(back.cells().collect::<Vec<_>>(), full.cells().collect::<Vec<_>>());
    assert_eq!(read_alignment(&write_alignment(&back)).unwrap(), back);
}

#[test]
fn missing_file_is_an_io_error() {
    let err = load_ontology(&fixture("nope.rdf"), OntologyFormat::RdfXml, &[]).unwrap_err();
    assert!(matches!(err, ontoprep_core::Error::Io { .. }));
}
