//! Batch harness around `ontoprep-core`: experiment manifests, sweeps over
//! ontology pairs, pipelines and repair modes, and the report files they
//! produce.

pub mod config;
pub mod error;
pub mod experiment;
pub mod resources;

pub use config::{ExperimentConfig, OntologyPair, PipelineSpec, RepairMode, RunOptions};
pub use error::{CliError, Result};
pub use experiment::{run_experiment, ItemFailure, ReportRecord, RunSummary};
