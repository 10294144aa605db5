//! Syntactic ontology matching built around the classical text-preprocessing
//! pipeline (tokenise, normalise, remove stop words, stem or lemmatise).
//!
//! The crate covers the whole path from ontology documents to scored
//! alignments:
//!
//! * [`ontology`] and [`alignment_format`] read ontologies and alignment files,
//! * [`textprep`] implements every preprocessing step and composes them into a
//!   canonical-key function,
//! * [`matcher`] joins two ontologies on equal canonical keys,
//! * [`metrics`] scores an alignment against a reference,
//! * [`reserved`] finds the reserved words that keep distinct entities of one
//!   ontology apart (repair before preprocessing),
//! * [`llm`] filters candidate mappings with yes/no chat prompts (repair after
//!   preprocessing).

pub mod alignment_format;
pub mod error;
pub mod llm;
pub mod matcher;
pub mod metrics;
pub mod model;
pub mod ontology;
pub mod reserved;
pub mod textprep;

pub use error::{Error, Result};
pub use model::{Alignment, Category, Correspondence, EntityKind, EntityRef, OntologyDoc, Relation};
