//! Experiment manifests (TOML).
//!
//! ```toml
//! track = "conference"
//! track_root = "conference"      # relative to this file
//! output_dir = "out"
//! repair = ["none", "logic"]
//! manifest = "manifest.toml"     # pairs listed in a track manifest, or inline:
//!
//! [[pairs]]
//! id = "cmt-edas"
//! dir = "cmt-edas"               # holds source.rdf, target.rdf, reference.rdf
//!
//! [[pipelines]]
//! id = "tn"
//! steps = "T,N"
//! ```
//!
//! Relative paths are resolved against the file that names them; pair paths
//! against `track_root`.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ontoprep_core::llm::{PromptTemplate, ProviderConfig};
use ontoprep_core::ontology::{LabelPolicy, OntologyFormat};
use ontoprep_core::textprep::PipelineConfig;
use serde::{Deserialize, Serialize};

use crate::error::{read_file, CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepairMode {
    None,
    /// Reserved words found before preprocessing.
    Logic,
    /// Yes/no prompts after matching.
    Llm,
    /// Reserved words, then prompts.
    Combined,
}

impl RepairMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RepairMode::None => "none",
            RepairMode::Logic => "logic",
            RepairMode::Llm => "llm",
            RepairMode::Combined => "combined",
        }
    }

    pub fn uses_reserved_words(self) -> bool {
        matches!(self, RepairMode::Logic | RepairMode::Combined)
    }

    pub fn uses_llm(self) -> bool {
        matches!(self, RepairMode::Llm | RepairMode::Combined)
    }
}

impl fmt::Display for RepairMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RepairMode {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" => Ok(RepairMode::None),
            "logic" => Ok(RepairMode::Logic),
            "llm" => Ok(RepairMode::Llm),
            "combined" => Ok(RepairMode::Combined),
            other => Err(CliError::Config(format!("unknown repair mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OntologyPair {
    pub id: String,
    pub source: PathBuf,
    pub target: PathBuf,
    pub reference: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineSpec {
    pub id: String,
    pub config: PipelineConfig,
}

/// Settings that apply to every item of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    /// `None` guesses from each file's extension.
    pub format: Option<OntologyFormat>,
    pub label_policy: LabelPolicy,
    pub annotation_props: Vec<String>,
    pub stop_keep: Option<PathBuf>,
    pub wordnet: Option<PathBuf>,
    pub template: PromptTemplate,
    /// Defaults to `llm-cache.jsonl` in the output directory.
    pub cache: Option<PathBuf>,
    pub jobs: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            format: None,
            label_policy: LabelPolicy::default(),
            annotation_props: Vec::new(),
            stop_keep: None,
            wordnet: None,
            template: PromptTemplate::default(),
            cache: None,
            jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub track: String,
    pub track_root: PathBuf,
    pub pairs: Vec<OntologyPair>,
    pub pipelines: Vec<PipelineSpec>,
    pub repair: Vec<RepairMode>,
    pub provider: Option<ProviderConfig>,
    pub output_dir: PathBuf,
    pub options: RunOptions,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(String),
    Many(Vec<String>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPair {
    id: Option<String>,
    dir: Option<PathBuf>,
    source: Option<PathBuf>,
    target: Option<PathBuf>,
    reference: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPipeline {
    id: Option<String>,
    steps: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    track: Option<String>,
    #[serde(default)]
    pairs: Vec<RawPair>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    track: Option<String>,
    track_root: Option<PathBuf>,
    manifest: Option<PathBuf>,
    output_dir: Option<PathBuf>,
    #[serde(default)]
    pairs: Vec<RawPair>,
    #[serde(default)]
    pipelines: Vec<RawPipeline>,
    repair: Option<OneOrMany>,
    provider: Option<ProviderConfig>,
    format: Option<String>,
    label_policy: Option<String>,
    #[serde(default)]
    annotation_props: Vec<String>,
    stop_keep: Option<PathBuf>,
    wordnet: Option<PathBuf>,
    template: Option<String>,
    cache: Option<PathBuf>,
    jobs: Option<usize>,
}

fn parse_toml<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let bytes = read_file(path)?;
    let text = String::from_utf8(bytes)
        .map_err(|_| CliError::Config(format!("{} is not UTF-8", path.display())))?;
    toml::from_str(&text).map_err(|source| CliError::Toml { path: path.display().to_string(), source })
}

fn parent_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

/// MELT-style directory: the first file whose stem is `source`, `target` or
/// `reference`.
fn find_in_dir(dir: &Path, stem: &str) -> Result<PathBuf> {
    let entries = std::fs::read_dir(dir)
        .map_err(|e| CliError::io(format!("listing {}", dir.display()), e))?;
    let mut found: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.file_stem().and_then(|s| s.to_str()) == Some(stem))
        .collect();
    found.sort();
    found
        .into_iter()
        .next()
        .ok_or_else(|| CliError::Config(format!("no `{stem}.*` file in {}", dir.display())))
}

fn resolve_pair(raw: RawPair, root: &Path, index: usize) -> Result<OntologyPair> {
    let dir = raw.dir.map(|d| root.join(d));
    let pick = |explicit: Option<PathBuf>, stem: &str| -> Result<PathBuf> {
        match (explicit, &dir) {
            (Some(path), Some(dir)) => Ok(dir.join(path)),
            (Some(path), None) => Ok(root.join(path)),
            (None, Some(dir)) => find_in_dir(dir, stem),
            (None, None) => {
                Err(CliError::Config(format!("pair {} has no `{stem}` and no `dir`", index + 1)))
            }
        }
    };
    let source = pick(raw.source, "source")?;
    let target = pick(raw.target, "target")?;
    let reference = pick(raw.reference, "reference")?;
    let id = match (raw.id, &dir) {
        (Some(id), _) => id,
        (None, Some(dir)) => dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| format!("pair{}", index + 1)),
        (None, None) => format!("pair{}", index + 1),
    };
    Ok(OntologyPair { id, source, target, reference })
}

/// File-name form of an identifier.
pub fn file_stem(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || "-_+.".contains(c) { c } else { '_' })
        .collect()
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let raw: RawConfig = parse_toml(path)?;
        let base = parent_dir(path);
        let track_root = base.join(raw.track_root.unwrap_or_default());

        let mut track = raw.track;
        let mut raw_pairs = Vec::new();
        let mut manifest_root = track_root.clone();
        if let Some(manifest) = raw.manifest {
            let manifest_path = track_root.join(manifest);
            let m: RawManifest = parse_toml(&manifest_path)?;
            manifest_root = parent_dir(&manifest_path);
            track = track.or(m.track);
            raw_pairs.extend(m.pairs.into_iter().map(|p| (p, true)));
        }
        raw_pairs.extend(raw.pairs.into_iter().map(|p| (p, false)));
        let pairs = raw_pairs
            .into_iter()
            .enumerate()
            .map(|(i, (p, from_manifest))| {
                resolve_pair(p, if from_manifest { &manifest_root } else { &track_root }, i)
            })
            .collect::<Result<Vec<_>>>()?;

        let pipelines = raw
            .pipelines
            .into_iter()
            .map(|p| {
                let config = PipelineConfig::parse(&p.steps)?;
                Ok(PipelineSpec { id: p.id.unwrap_or_else(|| config.id()), config })
            })
            .collect::<Result<Vec<_>>>()?;

        let repair = match raw.repair {
            None => vec![RepairMode::None],
            Some(OneOrMany::One(s)) => vec![s.parse()?],
            Some(OneOrMany::Many(v)) => v.iter().map(|s| s.parse()).collect::<Result<_>>()?,
        };

        let defaults = RunOptions::default();
        let options = RunOptions {
            format: raw.format.map(|f| f.parse()).transpose()?,
            label_policy: raw
                .label_policy
                .map(|p| p.parse().map_err(CliError::Config))
                .transpose()?
                .unwrap_or_default(),
            annotation_props: raw.annotation_props,
            stop_keep: raw.stop_keep.map(|p| base.join(p)),
            wordnet: raw.wordnet.map(|p| base.join(p)),
            template: raw
                .template
                .map(|t| t.parse().map_err(CliError::Config))
                .transpose()?
                .unwrap_or_default(),
            cache: raw.cache.map(|p| base.join(p)),
            jobs: raw.jobs.unwrap_or(defaults.jobs),
        };

        let config = ExperimentConfig {
            track: track.unwrap_or_else(|| "track".into()),
            track_root,
            pairs,
            pipelines,
            repair,
            provider: raw.provider,
            output_dir: base.join(raw.output_dir.unwrap_or_else(|| PathBuf::from("out"))),
            options,
        };
        config.validate()?;
        Ok(config)
    }

    /// Paths exist, identifiers are unique (also as file names), and LLM
    /// modes have a valid provider.
    pub fn validate(&self) -> Result<()> {
        if self.pairs.is_empty() {
            return Err(CliError::Config("no ontology pairs".into()));
        }
        if self.pipelines.is_empty() {
            return Err(CliError::Config("no pipelines".into()));
        }
        if self.repair.is_empty() {
            return Err(CliError::Config("no repair modes".into()));
        }
        if self.options.jobs == 0 {
            return Err(CliError::Config("jobs must be positive".into()));
        }
        let mut seen = BTreeSet::new();
        for pair in &self.pairs {
            if !seen.insert(file_stem(&pair.id)) {
                return Err(CliError::Config(format!("duplicate pair id `{}`", pair.id)));
            }
            for path in [&pair.source, &pair.target, &pair.reference] {
                if !path.is_file() {
                    return Err(CliError::Config(format!(
                        "pair `{}`: {} does not exist",
                        pair.id,
                        path.display()
                    )));
                }
            }
        }
        let mut seen = BTreeSet::new();
        for spec in &self.pipelines {
            spec.config.validate()?;
            if !seen.insert(file_stem(&spec.id)) {
                return Err(CliError::Config(format!("duplicate config id `{}`", spec.id)));
            }
        }
        if BTreeSet::from_iter(&self.repair).len() != self.repair.len() {
            return Err(CliError::Config("repair modes repeat".into()));
        }
        for path in [&self.options.stop_keep, &self.options.wordnet].into_iter().flatten() {
            if !path.exists() {
                return Err(CliError::Config(format!("{} does not exist", path.display())));
            }
        }
        if self.repair.iter().any(|m| m.uses_llm()) {
            match &self.provider {
                Some(provider) => provider.validate()?,
                None => {
                    return Err(CliError::Config("llm repair needs a [provider] table".into()))
                }
            }
        }
        Ok(())
    }

    /// Report identifier of a pipeline under a repair mode: the pipeline id,
    /// suffixed with `+mode` unless the mode is `none`.
    pub fn config_id(pipeline: &PipelineSpec, mode: RepairMode) -> String {
        match mode {
            RepairMode::None => pipeline.id.clone(),
            other => format!("{}+{}", pipeline.id, other),
        }
    }
}
