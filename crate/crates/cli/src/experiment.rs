//! Sweep runner: every (pair, pipeline, repair mode) item is matched,
//! optionally repaired and scored, and the results land in a report suite
//! under the output directory:
//!
//! * `report.csv` and `report.jsonl`, one row/record per item,
//! * `alignments/<pair>/<config>.rdf`,
//! * `reserved/<pair>/<pipeline>.txt` and `reserved_density.csv`,
//! * `llm/<pair>/<config>.jsonl` with one audit record per cell,
//! * `errors.log` with one line per failed item,
//! * `state/<pair>/<config>.json`, used to skip finished items on rerun.

use std::collections::BTreeSet;
use std::path::Path;

use ontoprep_core::alignment_format::{read_alignment, save_alignment};
use ontoprep_core::llm::{repair_alignment, CellDecision, ChatProvider, VerdictCache};
use ontoprep_core::matcher::match_ontologies;
use ontoprep_core::metrics::{evaluate, reserved_density, EvalReport};
use ontoprep_core::reserved::build_joint_reserved_set;
use ontoprep_core::textprep::{english_stop_list_checksum, Pipeline};
use ontoprep_core::{Alignment, OntologyDoc};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{file_stem, ExperimentConfig, OntologyPair, PipelineSpec, RepairMode};
use crate::error::{read_file, write_file, CliError, Result};
use crate::resources::{build_pipeline, parse_doc, read_word_list, sha256_hex, LexiconSource};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlmSummary {
    pub template: String,
    pub model: String,
    pub requests: usize,
    pub kept_by_keys: usize,
    pub kept_yes: usize,
    pub kept_unparseable: usize,
    pub removed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub input_sha256: String,
    pub stop_list_sha256: String,
    pub wordnet_sha256: Option<String>,
    pub label_policy: String,
    pub category_pooling: String,
    pub alignment_file: String,
}

/// One JSON line of `report.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub track: String,
    pub alignment_id: String,
    pub config_id: String,
    pub pipeline: String,
    pub repair: RepairMode,
    #[serde(flatten)]
    pub report: EvalReport,
    pub reserved_words: Option<usize>,
    pub reserved_density: Option<f64>,
    pub llm: Option<LlmSummary>,
    pub provenance: Provenance,
}

#[derive(Debug, Serialize)]
struct CsvRow<'a> {
    track: &'a str,
    alignment_id: &'a str,
    config_id: &'a str,
    tp: usize,
    fp: usize,
    #[serde(rename = "fn")]
    fn_: usize,
    precision: f64,
    recall: f64,
    f1: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItemFailure {
    pub alignment_id: String,
    pub config_id: String,
    pub message: String,
}

#[derive(Debug, Default)]
pub struct RunSummary {
    /// Successful items in manifest order (pairs, then pipelines, then modes).
    pub records: Vec<ReportRecord>,
    pub failures: Vec<ItemFailure>,
    /// Items taken from a previous run.
    pub resumed: usize,
}

impl RunSummary {
    /// 0 when every item succeeded, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.failures.is_empty() {
            0
        } else {
            2
        }
    }

    pub fn record(&self, alignment_id: &str, config_id: &str) -> Option<&ReportRecord> {
        self.records
            .iter()
            .find(|r| r.alignment_id == alignment_id && r.config_id == config_id)
    }
}

struct LoadedPair {
    source: OntologyDoc,
    target: OntologyDoc,
    reference: Alignment,
    checksum: String,
}

fn load_pair(pair: &OntologyPair, config: &ExperimentConfig) -> Result<LoadedPair> {
    let opts = &config.options;
    let (source_bytes, target_bytes, reference_bytes) =
        (read_file(&pair.source)?, read_file(&pair.target)?, read_file(&pair.reference)?);
    let checksum = sha256_hex(
        format!(
            "{}\n{}\n{}",
            sha256_hex(&source_bytes),
            sha256_hex(&target_bytes),
            sha256_hex(&reference_bytes)
        )
        .as_bytes(),
    );
    Ok(LoadedPair {
        source: parse_doc(&pair.source, &source_bytes, opts.format, &opts.annotation_props)?,
        target: parse_doc(&pair.target, &target_bytes, opts.format, &opts.annotation_props)?,
        reference: read_alignment(&reference_bytes)?,
        checksum,
    })
}

struct Context<'a> {
    config: &'a ExperimentConfig,
    lexicon: LexiconSource,
    provider: Option<Box<dyn ChatProvider>>,
    cache: Option<VerdictCache>,
    stop_keep_sha256: String,
}

struct Job<'a> {
    pair: &'a OntologyPair,
    loaded: &'a std::result::Result<LoadedPair, String>,
    spec: &'a PipelineSpec,
    pipeline: &'a std::result::Result<Pipeline, String>,
    mode: RepairMode,
    config_id: String,
}

impl Job<'_> {
    fn stem(&self) -> (String, String) {
        (file_stem(&self.pair.id), file_stem(&self.config_id))
    }
}

/// Runs every item, reusing finished ones, and rewrites the report files.
/// Reserved-word modes are left out for pipelines without tokenise and
/// normalise.
///
/// Item failures are collected in the summary and in `errors.log`; only
/// problems that stop the whole run (unwritable output, unusable provider or
/// cache) are returned as errors.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunSummary> {
    config.validate()?;
    let out = &config.output_dir;
    std::fs::create_dir_all(out)
        .map_err(|e| CliError::io(format!("creating {}", out.display()), e))?;

    let stop_keep = match &config.options.stop_keep {
        Some(path) => read_word_list(path)?,
        None => BTreeSet::new(),
    };
    let needs_llm = config.repair.iter().any(|m| m.uses_llm());
    let ctx = Context {
        config,
        lexicon: LexiconSource::new(config.options.wordnet.clone()),
        provider: match (&config.provider, needs_llm) {
            (Some(provider), true) => Some(provider.connect()?),
            _ => None,
        },
        cache: if needs_llm {
            let path = config.options.cache.clone().unwrap_or_else(|| out.join("llm-cache.jsonl"));
            Some(VerdictCache::open(path)?)
        } else {
            None
        },
        stop_keep_sha256: sha256_hex(
            stop_keep.iter().map(|w| format!("{w}\n")).collect::<String>().as_bytes(),
        ),
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.options.jobs)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;

    let (pipelines, loaded): (Vec<_>, Vec<_>) = pool.install(|| {
        let pipelines = config
            .pipelines
            .iter()
            .map(|spec| {
                build_pipeline(spec.config.clone(), &stop_keep, &ctx.lexicon)
                    .map_err(|e| e.to_string())
            })
            .collect();
        let loaded = config
            .pairs
            .par_iter()
            .map(|pair| load_pair(pair, config).map_err(|e| e.to_string()))
            .collect();
        (pipelines, loaded)
    });

    let mut jobs = Vec::new();
    for (pair, loaded) in config.pairs.iter().zip(&loaded) {
        for (spec, pipeline) in config.pipelines.iter().zip(&pipelines) {
            for &mode in &config.repair {
                if mode.uses_reserved_words() && !spec.config.supports_reserved_words() {
                    continue;
                }
                let config_id = ExperimentConfig::config_id(spec, mode);
                jobs.push(Job { pair, loaded, spec, pipeline, mode, config_id });
            }
        }
    }

    let results: Vec<(std::result::Result<ReportRecord, String>, bool)> =
        pool.install(|| jobs.par_iter().map(|job| run_job(&ctx, job)).collect());

    let mut summary = RunSummary::default();
    for (job, (result, resumed)) in jobs.iter().zip(results) {
        match result {
            Ok(record) => {
                summary.resumed += usize::from(resumed);
                summary.records.push(record);
            }
            Err(message) => summary.failures.push(ItemFailure {
                alignment_id: job.pair.id.clone(),
                config_id: job.config_id.clone(),
                message,
            }),
        }
    }
    write_reports(out, &summary)?;
    Ok(summary)
}

fn item_checksum(ctx: &Context<'_>, job: &Job<'_>, loaded: &LoadedPair, pipeline: &Pipeline) -> String {
    let opts = &ctx.config.options;
    let mut parts = vec![
        loaded.checksum.clone(),
        job.config_id.clone(),
        pipeline.id(),
        job.mode.to_string(),
        english_stop_list_checksum(),
        ctx.stop_keep_sha256.clone(),
        opts.label_policy.to_string(),
        format!("{:?}", opts.format),
        opts.annotation_props.join(" "),
    ];
    if let Some(lexicon) = pipeline.lexicon() {
        parts.push(lexicon.checksum().to_owned());
    }
    if job.mode.uses_llm() {
        parts.push(opts.template.to_string());
        parts.push(serde_json::to_string(&ctx.config.provider).unwrap_or_default());
    }
    sha256_hex(parts.join("\n").as_bytes())
}

fn run_job(ctx: &Context<'_>, job: &Job<'_>) -> (std::result::Result<ReportRecord, String>, bool) {
    let loaded = match job.loaded {
        Ok(loaded) => loaded,
        Err(e) => return (Err(format!("loading pair: {e}")), false),
    };
    let pipeline = match job.pipeline {
        Ok(pipeline) => pipeline,
        Err(e) => return (Err(e.clone()), false),
    };
    let checksum = item_checksum(ctx, job, loaded, pipeline);
    let (pair_stem, config_stem) = job.stem();
    let out = &ctx.config.output_dir;
    let state_path = out.join("state").join(&pair_stem).join(format!("{config_stem}.json"));
    let alignment_rel = format!("alignments/{pair_stem}/{config_stem}.rdf");

    if let Some(record) = finished(&state_path, &checksum, &out.join(&alignment_rel)) {
        return (Ok(record), true);
    }
    let result = execute(ctx, job, loaded, pipeline, checksum, &alignment_rel).and_then(|record| {
        write_file(&state_path, &serde_json::to_vec(&record)?)?;
        Ok(record)
    });
    (result.map_err(|e| e.to_string()), false)
}

fn finished(state_path: &Path, checksum: &str, alignment_path: &Path) -> Option<ReportRecord> {
    let bytes = std::fs::read(state_path).ok()?;
    let record: ReportRecord = serde_json::from_slice(&bytes).ok()?;
    (record.provenance.input_sha256 == checksum && alignment_path.is_file()).then_some(record)
}

fn execute(
    ctx: &Context<'_>,
    job: &Job<'_>,
    loaded: &LoadedPair,
    pipeline: &Pipeline,
    checksum: String,
    alignment_rel: &str,
) -> Result<ReportRecord> {
    let opts = &ctx.config.options;
    let out = &ctx.config.output_dir;
    let (pair_stem, config_stem) = job.stem();
    let (source, target) = (&loaded.source, &loaded.target);

    let mut reserved = None;
    let mut density = None;
    if job.mode.uses_reserved_words() {
        let set = build_joint_reserved_set(source, target, pipeline, opts.label_policy)?;
        density = Some(reserved_density(&set, source, target)?);
        write_file(
            &out.join("reserved").join(&pair_stem).join(format!("{}.txt", file_stem(&job.spec.id))),
            set.to_file_string().as_bytes(),
        )?;
        reserved = Some(set);
    }

    let mut alignment =
        match_ontologies(source, target, pipeline, reserved.as_ref(), opts.label_policy);

    let mut llm = None;
    if job.mode.uses_llm() {
        let (Some(provider), Some(cache), Some(provider_config)) =
            (&ctx.provider, &ctx.cache, &ctx.config.provider)
        else {
            return Err(CliError::Config("llm repair needs a provider".into()));
        };
        let outcome = repair_alignment(
            &alignment,
            source,
            target,
            provider.as_ref(),
            provider_config,
            opts.template,
            cache,
            opts.label_policy,
        )?;
        let mut audit = Vec::new();
        for record in &outcome.audits {
            serde_json::to_writer(&mut audit, record)?;
            audit.push(b'\n');
        }
        write_file(&out.join("llm").join(&pair_stem).join(format!("{config_stem}.jsonl")), &audit)?;
        llm = Some(LlmSummary {
            template: opts.template.to_string(),
            model: provider_config.model_name.clone(),
            requests: outcome.requests,
            kept_by_keys: outcome.count(CellDecision::KeptByKeys),
            kept_yes: outcome.count(CellDecision::KeptYes),
            kept_unparseable: outcome.count(CellDecision::KeptUnparseable),
            removed: outcome.count(CellDecision::RemovedNo),
        });
        alignment = outcome.alignment;
    }

    alignment.provenance = format!(
        "{}; repair={}; label-policy={}",
        alignment.provenance, job.mode, opts.label_policy
    );
    save_alignment(&out.join(alignment_rel), &alignment)?;

    Ok(ReportRecord {
        track: ctx.config.track.clone(),
        alignment_id: job.pair.id.clone(),
        config_id: job.config_id.clone(),
        pipeline: pipeline.id(),
        repair: job.mode,
        report: evaluate(&alignment, &loaded.reference),
        reserved_words: reserved.as_ref().map(|r| r.len()),
        reserved_density: density,
        llm,
        provenance: Provenance {
            input_sha256: checksum,
            stop_list_sha256: english_stop_list_checksum(),
            wordnet_sha256: pipeline.lexicon().map(|l| l.checksum().to_owned()),
            label_policy: opts.label_policy.to_string(),
            category_pooling: "class | object+datatype property".into(),
            alignment_file: alignment_rel.to_owned(),
        },
    })
}

pub fn csv_header() -> &'static str {
    "track,alignment_id,config_id,tp,fp,fn,precision,recall,f1"
}

/// Writes the CSV rows of `records` (with header) to any writer.
pub fn write_csv<W: std::io::Write>(writer: W, records: &[ReportRecord]) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    for r in records {
        csv.serialize(CsvRow {
            track: &r.track,
            alignment_id: &r.alignment_id,
            config_id: &r.config_id,
            tp: r.report.tp,
            fp: r.report.fp,
            fn_: r.report.fn_,
            precision: r.report.precision,
            recall: r.report.recall,
            f1: r.report.f1,
        })?;
    }
    if records.is_empty() {
        csv.write_record(csv_header().split(','))?;
    }
    csv.flush().map_err(|e| CliError::io("writing csv", e))?;
    Ok(())
}

fn write_reports(out: &Path, summary: &RunSummary) -> Result<()> {
    let mut csv = Vec::new();
    write_csv(&mut csv, &summary.records)?;
    write_file(&out.join("report.csv"), &csv)?;

    let mut jsonl = Vec::new();
    for record in &summary.records {
        serde_json::to_writer(&mut jsonl, record)?;
        jsonl.push(b'\n');
    }
    write_file(&out.join("report.jsonl"), &jsonl)?;

    // One density row per (pair, pipeline), whichever repair mode produced it.
    let mut seen = BTreeSet::new();
    let mut density_csv = csv::Writer::from_writer(Vec::new());
    density_csv.write_record(["track", "alignment_id", "pipeline", "reserved_words", "reserved_density"])?;
    for r in &summary.records {
        let (Some(words), Some(density)) = (r.reserved_words, r.reserved_density) else { continue };
        if seen.insert((&r.alignment_id, &r.pipeline)) {
            density_csv.write_record([
                r.track.as_str(),
                r.alignment_id.as_str(),
                r.pipeline.as_str(),
                &words.to_string(),
                &density.to_string(),
            ])?;
        }
    }
    let bytes = density_csv
        .into_inner()
        .map_err(|e| CliError::io("writing csv", e.into_error()))?;
    write_file(&out.join("reserved_density.csv"), &bytes)?;

    let log: String = summary
        .failures
        .iter()
        .map(|f| format!("{}\t{}\t{}\n", f.alignment_id, f.config_id, f.message.replace('\n', " ")))
        .collect();
    write_file(&out.join("errors.log"), log.as_bytes())
}
