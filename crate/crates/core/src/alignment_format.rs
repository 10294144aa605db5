//! Reader and writer for the Alignment format (RDF/XML `Cell` lists) used by
//! OAEI reference files.

use std::borrow::Cow;

use quick_xml::escape::escape;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use crate::error::{Error, Result};
use crate::model::{Alignment, Correspondence, Relation};

pub const ALIGNMENT_NS: &str = "http://knowledgeweb.semanticweb.org/heterogeneity/alignment";
const ALIGN_EXT_NS: &str = "http://knowledgeweb.semanticweb.org/heterogeneity/align#";
const XSD_FLOAT: &str = "http://www.w3.org/2001/XMLSchema#float";

#[derive(Default)]
struct CellBuilder {
    entity1: Option<String>,
    entity2: Option<String>,
    relation: Option<String>,
    measure: Option<String>,
}

#[derive(Clone, Copy, PartialEq)]
enum TextTarget {
    Relation,
    Measure,
    Entity1,
    Entity2,
    Onto1,
    Onto2,
    Method,
}

/// Reads an alignment file.
pub fn load_alignment(path: &std::path::Path) -> Result<Alignment> {
    let bytes = std::fs::read(path)
        .map_err(|e| Error::io(format!("reading alignment {}", path.display()), e))?;
    read_alignment(&bytes)
}

/// Writes an alignment file, creating parent directories as needed.
pub fn save_alignment(path: &std::path::Path, alignment: &Alignment) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)
            .map_err(|e| Error::io(format!("creating {}", parent.display()), e))?;
    }
    std::fs::write(path, write_alignment(alignment))
        .map_err(|e| Error::io(format!("writing alignment {}", path.display()), e))
}

/// Parses an Alignment-format document. Cells without a `measure` get
/// confidence 1.0; any relation other than `=` is rejected.
pub fn read_alignment(document: &[u8]) -> Result<Alignment> {
    let mut reader = Reader::from_reader(document);
    reader.config_mut().trim_text(true);
    let mut buf = Vec::new();

    let mut alignment = Alignment::default();
    let mut cell: Option<CellBuilder> = None;
    let mut text_target: Option<TextTarget> = None;
    let mut text = String::new();
    let mut onto_depth: Option<TextTarget> = None;
    let mut saw_alignment = false;

    loop {
        let event = reader
            .read_event_into(&mut buf)
            .map_err(|e| xml_error(document, reader.error_position(), e.to_string()))?;
        match event {
            Event::Start(ref start) | Event::Empty(ref start) => {
                let is_empty = matches!(event, Event::Empty(_));
                let name = local(start);
                match name.as_ref() {
                    b"Alignment" => saw_alignment = true,
                    b"Cell" => cell = Some(CellBuilder::default()),
                    b"entity1" | b"entity2" if cell.is_some() => {
                        let target = if name.as_ref() == b"entity1" {
                            TextTarget::Entity1
                        } else {
                            TextTarget::Entity2
                        };
                        match resource_attr(start, document, &reader)? {
                            Some(iri) => set_entity(cell.as_mut().unwrap(), target, iri),
                            None if !is_empty => begin_text(&mut text_target, &mut text, target),
                            None => {}
                        }
                    }
                    b"relation" if cell.is_some() && !is_empty => {
                        begin_text(&mut text_target, &mut text, TextTarget::Relation)
                    }
                    b"measure" if cell.is_some() && !is_empty => {
                        begin_text(&mut text_target, &mut text, TextTarget::Measure)
                    }
                    b"onto1" | b"onto2" if cell.is_none() => {
                        let target =
                            if name.as_ref() == b"onto1" { TextTarget::Onto1 } else { TextTarget::Onto2 };
                        onto_depth = Some(target);
                        if !is_empty {
                            begin_text(&mut text_target, &mut text, target);
                        }
                    }
                    b"Ontology" => {
                        if let (Some(target), Some(about)) =
                            (onto_depth, about_attr(start, document, &reader)?)
                        {
                            set_onto(&mut alignment, target, about);
                            text_target = None;
                        }
                    }
                    b"method" if cell.is_none() && !is_empty => {
                        begin_text(&mut text_target, &mut text, TextTarget::Method)
                    }
                    _ => {}
                }
            }
            Event::Text(t) => {
                if text_target.is_some() {
                    let value = t
                        .unescape()
                        .map_err(|e| xml_error(document, reader.buffer_position(), e.to_string()))?;
                    text.push_str(&value);
                }
            }
            Event::CData(t) => {
                if text_target.is_some() {
                    text.push_str(&String::from_utf8_lossy(&t));
                }
            }
            Event::End(ref end) => {
                let name = end.local_name();
                match name.as_ref() {
                    b"Cell" => {
                        let Some(done) = cell.take() else { continue };
                        let correspondence = finish_cell(done)?;
                        alignment.insert(correspondence);
                    }
                    b"onto1" | b"onto2" => onto_depth = None,
                    _ => {}
                }
                if let Some(target) = text_target {
                    if closes(target, name.as_ref()) {
                        let value = std::mem::take(&mut text).trim().to_owned();
                        text_target = None;
                        match target {
                            TextTarget::Relation => cell.as_mut().unwrap().relation = Some(value),
                            TextTarget::Measure => cell.as_mut().unwrap().measure = Some(value),
                            TextTarget::Entity1 | TextTarget::Entity2 => {
                                if !value.is_empty() {
                                    set_entity(cell.as_mut().unwrap(), target, value)
                                }
                            }
                            TextTarget::Onto1 | TextTarget::Onto2 => {
                                set_onto(&mut alignment, target, value)
                            }
                            TextTarget::Method => alignment.provenance = value,
                        }
                    }
                }
            }
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }

    if !saw_alignment {
        return Err(Error::malformed("no Alignment element found"));
    }
    Ok(alignment)
}

fn begin_text(slot: &mut Option<TextTarget>, text: &mut String, target: TextTarget) {
    *slot = Some(target);
    text.clear();
}

fn closes(target: TextTarget, name: &[u8]) -> bool {
    matches!(
        (target, name),
        (TextTarget::Relation, b"relation")
            | (TextTarget::Measure, b"measure")
            | (TextTarget::Entity1, b"entity1")
            | (TextTarget::Entity2, b"entity2")
            | (TextTarget::Onto1, b"onto1")
            | (TextTarget::Onto2, b"onto2")
            | (TextTarget::Method, b"method")
    )
}

fn set_entity(cell: &mut CellBuilder, target: TextTarget, iri: String) {
    match target {
        TextTarget::Entity1 => cell.entity1 = Some(iri),
        _ => cell.entity2 = Some(iri),
    }
}

fn set_onto(alignment: &mut Alignment, target: TextTarget, iri: String) {
    match target {
        TextTarget::Onto1 => alignment.source_ontology = iri,
        _ => alignment.target_ontology = iri,
    }
}

fn finish_cell(cell: CellBuilder) -> Result<Correspondence> {
    let entity1 = cell.entity1.ok_or_else(|| Error::malformed("Cell without entity1"))?;
    let entity2 = cell.entity2.ok_or_else(|| Error::malformed("Cell without entity2"))?;
    let relation = Relation::parse(cell.relation.as_deref().unwrap_or("="))?;
    let confidence = match cell.measure.as_deref() {
        None | Some("") => 1.0,
        Some(raw) => raw
            .parse::<f64>()
            .map_err(|_| Error::malformed(format!("measure `{raw}` is not a number")))?,
    };
    let mut correspondence = Correspondence::new(entity1, entity2, confidence)?;
    correspondence.relation = relation;
    Ok(correspondence)
}

fn local<'a>(start: &'a BytesStart<'_>) -> Cow<'a, [u8]> {
    Cow::Borrowed(start.local_name().into_inner())
}

fn attr_by_local(
    start: &BytesStart<'_>,
    wanted: &[u8],
    document: &[u8],
    reader: &Reader<&[u8]>,
) -> Result<Option<String>> {
    for attr in start.attributes() {
        let attr =
            attr.map_err(|e| xml_error(document, reader.buffer_position(), e.to_string()))?;
        if attr.key.local_name().as_ref() == wanted {
            let value = attr
                .unescape_value()
                .map_err(|e| xml_error(document, reader.buffer_position(), e.to_string()))?;
            return Ok(Some(value.into_owned()));
        }
    }
    Ok(None)
}

fn resource_attr(start: &BytesStart<'_>, document: &[u8], reader: &Reader<&[u8]>) -> Result<Option<String>> {
    attr_by_local(start, b"resource", document, reader)
}

fn about_attr(start: &BytesStart<'_>, document: &[u8], reader: &Reader<&[u8]>) -> Result<Option<String>> {
    attr_by_local(start, b"about", document, reader)
}

fn xml_error(document: &[u8], position: u64, message: String) -> Error {
    let offset = (position as usize).min(document.len());
    let before = &document[..offset];
    let line = before.iter().filter(|&&b| b == b'\n').count() as u64 + 1;
    let line_start = before.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1);
    let column = String::from_utf8_lossy(&before[line_start..]).chars().count() as u64 + 1;
    Error::MalformedDocument { message, line: Some(line), column: Some(column) }
}

/// Serialises `alignment` as an Alignment-format document. Cells come out in
/// `(entity1, entity2)` order, so equal alignments give identical bytes.
pub fn write_alignment(alignment: &Alignment) -> Vec<u8> {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"utf-8\"?>\n");
    out.push_str(&format!(
        "<rdf:RDF xmlns=\"{ALIGNMENT_NS}\"\n         \
         xmlns:rdf=\"http://www.w3.org/1999/02/22-rdf-syntax-ns#\"\n         \
         xmlns:xsd=\"http://www.w3.org/2001/XMLSchema#\"\n         \
         xmlns:align=\"{ALIGN_EXT_NS}\">\n"
    ));
    out.push_str("<Alignment>\n  <xml>yes</xml>\n  <level>0</level>\n  <type>**</type>\n");
    if !alignment.provenance.is_empty() {
        out.push_str(&format!("  <align:method>{}</align:method>\n", escape(&alignment.provenance)));
    }
    for (tag, iri) in [("onto1", &alignment.source_ontology), ("onto2", &alignment.target_ontology)] {
        out.push_str(&format!("  <{tag}><Ontology rdf:about=\"{}\"/></{tag}>\n", escape(iri.as_str())));
    }
    for cell in alignment.cells() {
        out.push_str("  <map>\n    <Cell>\n");
        out.push_str(&format!("      <entity1 rdf:resource=\"{}\"/>\n", escape(cell.entity1.as_str())));
        out.push_str(&format!("      <entity2 rdf:resource=\"{}\"/>\n", escape(cell.entity2.as_str())));
        out.push_str(&format!("      <relation>{}</relation>\n", cell.relation.as_str()));
        out.push_str(&format!(
            "      <measure rdf:datatype=\"{XSD_FLOAT}\">{:?}</measure>\n",
            cell.confidence
        ));
        out.push_str("    </Cell>\n  </map>\n");
    }
    out.push_str("</Alignment>\n</rdf:RDF>\n");
    out.into_bytes()
}
