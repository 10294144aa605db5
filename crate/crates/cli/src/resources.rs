//! Loading helpers shared by the single-shot commands and the sweep runner.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::{Arc, OnceLock};

use ontoprep_core::ontology::{parse_ontology_with_base, OntologyFormat};
use ontoprep_core::textprep::{MorphyLexicon, Pipeline, PipelineConfig};
use ontoprep_core::OntologyDoc;
use sha2::{Digest, Sha256};

use crate::error::{read_file, Result};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Words kept out of the stop list: one per line, `#` starts a comment.
pub fn read_word_list(path: &Path) -> Result<BTreeSet<String>> {
    let bytes = read_file(path)?;
    Ok(String::from_utf8_lossy(&bytes)
        .lines()
        .map(|line| line.split('#').next().unwrap_or("").trim().to_lowercase())
        .filter(|word| !word.is_empty())
        .collect())
}

/// WordNet lexicon loaded on first use, from a directory or the bundled copy.
#[derive(Debug, Default)]
pub struct LexiconSource {
    dir: Option<PathBuf>,
    loaded: OnceLock<Arc<MorphyLexicon>>,
}

impl LexiconSource {
    pub fn new(dir: Option<PathBuf>) -> Self {
        LexiconSource { dir, loaded: OnceLock::new() }
    }

    pub fn get(&self) -> Result<Arc<MorphyLexicon>> {
        if let Some(lexicon) = self.loaded.get() {
            return Ok(lexicon.clone());
        }
        let lexicon = match &self.dir {
            Some(dir) => MorphyLexicon::load(dir)?,
            None => MorphyLexicon::load_bundled()?,
        };
        Ok(self.loaded.get_or_init(|| Arc::new(lexicon)).clone())
    }

    /// Checksum of the lexicon if it has been loaded.
    pub fn checksum(&self) -> Option<String> {
        self.loaded.get().map(|l| l.checksum().to_owned())
    }
}

pub fn build_pipeline(
    config: PipelineConfig,
    stop_keep: &BTreeSet<String>,
    lexicon: &LexiconSource,
) -> Result<Pipeline> {
    let config = config.with_stop_list_keep(stop_keep.clone());
    config.validate()?;
    let lexicon = if config.needs_lexicon() { Some(lexicon.get()?) } else { None };
    Ok(Pipeline::new(config, lexicon)?)
}

/// Format from the flag, else from the extension, else RDF/XML.
pub fn resolve_format(path: &Path, format: Option<OntologyFormat>) -> OntologyFormat {
    format.or_else(|| OntologyFormat::from_path(path)).unwrap_or(OntologyFormat::RdfXml)
}

/// Parses an ontology from bytes already read from `path`.
pub fn parse_doc(
    path: &Path,
    bytes: &[u8],
    format: Option<OntologyFormat>,
    annotation_props: &[String],
) -> Result<OntologyDoc> {
    let base = std::path::absolute(path).ok().map(|abs| format!("file://{}", abs.display()));
    let mut doc = parse_ontology_with_base(
        bytes,
        resolve_format(path, format),
        annotation_props,
        base.as_deref(),
    )?;
    doc.source_path = path.display().to_string();
    Ok(doc)
}

pub fn load_doc(
    path: &Path,
    format: Option<OntologyFormat>,
    annotation_props: &[String],
) -> Result<OntologyDoc> {
    parse_doc(path, &read_file(path)?, format, annotation_props)
}
