use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ontoprep_core::alignment_format::{load_alignment, save_alignment, write_alignment};
use ontoprep_core::llm::{repair_alignment, CellDecision, PromptTemplate, ProviderConfig, VerdictCache};
use ontoprep_core::matcher::match_ontologies;
use ontoprep_core::metrics::{evaluate, reserved_density};
use ontoprep_core::ontology::{LabelPolicy, OntologyFormat};
use ontoprep_core::reserved::build_joint_reserved_set;
use ontoprep_core::textprep::{english_stop_list_checksum, Pipeline, PipelineConfig, ReservedWordSet};
use ontoprep_core::{Alignment, OntologyDoc};
use ontoprep_cli::error::{CliError, Result};
use ontoprep_cli::experiment::{write_csv, LlmSummary, Provenance, ReportRecord};
use ontoprep_cli::resources::{build_pipeline, load_doc, read_word_list, sha256_hex, LexiconSource};
use ontoprep_cli::{run_experiment, ExperimentConfig, RepairMode};

#[derive(Parser)]
#[command(name = "ontoprep", version, about = "Syntactic ontology matching with text preprocessing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Ontology syntax; guessed from the file extension when omitted.
    #[arg(long, value_parser = parse_format)]
    format: Option<OntologyFormat>,
    /// Which entity text is matched: name-first or label-first.
    #[arg(long, default_value = "name-first", value_parser = parse_policy)]
    label_policy: LabelPolicy,
    /// Words to keep out of the stop list, one per line.
    #[arg(long)]
    stop_keep: Option<PathBuf>,
    /// WordNet directory (index.* and *.exc); the bundled copy by default.
    #[arg(long)]
    wordnet: Option<PathBuf>,
    /// Extra annotation property IRIs read as labels.
    #[arg(long = "annotation-prop")]
    annotation_props: Vec<String>,
}

#[derive(Args)]
struct PairArgs {
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    target: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Match two ontologies and write an alignment file.
    Match {
        #[command(flatten)]
        pair: PairArgs,
        /// Steps such as "T,N,R,S:porter"; "none" for raw text.
        #[arg(long, default_value = "T,N")]
        pipeline: String,
        /// Reserved-word file (one word per line).
        #[arg(long)]
        reserved: Option<PathBuf>,
        /// Output alignment file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Score an alignment against a reference.
    Eval {
        #[arg(long)]
        alignment: PathBuf,
        #[arg(long)]
        reference: PathBuf,
        #[arg(long, default_value = "adhoc")]
        track: String,
        /// Identifier of the alignment in the report; the file stem by default.
        #[arg(long)]
        alignment_id: Option<String>,
        #[arg(long, default_value = "adhoc")]
        config_id: String,
        /// Print a CSV row instead of JSON.
        #[arg(long)]
        csv: bool,
    },
    /// Find reserved words for two ontologies, optionally re-matching with them.
    RepairLogic {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value = "T,N,R,S:porter")]
        pipeline: String,
        /// Reserved-word file to write; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also match with the reserved words and write the alignment here.
        #[arg(long)]
        rematch: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Drop alignment cells a chat model answers "no" for.
    RepairLlm {
        #[arg(long)]
        alignment: PathBuf,
        #[command(flatten)]
        pair: PairArgs,
        /// Provider TOML file, or `stub` for the built-in stub.
        #[arg(long)]
        provider: String,
        #[arg(long, default_value = "PT1", value_parser = parse_template)]
        template: PromptTemplate,
        /// Verdict cache (JSON lines); in memory when omitted.
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Repaired alignment; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-cell audit records (JSON lines).
        #[arg(long)]
        audit: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Run an experiment manifest and write the report suite.
    Sweep {
        config: PathBuf,
        /// Parallel (pair, pipeline, repair) items.
        #[arg(long)]
        jobs: Option<usize>,
        /// Output directory, overriding the manifest.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_parser = parse_template)]
        template: Option<PromptTemplate>,
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Provider TOML file overriding the manifest's table.
        #[arg(long)]
        provider: Option<String>,
    },
    /// Reserved words per 100 entities of two ontologies.
    ReservedDensity {
        #[arg(long)]
        reserved: PathBuf,
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        common: Common,
    },
}

fn parse_format(s: &str) -> std::result::Result<OntologyFormat, String> {
    s.parse().map_err(|e: ontoprep_core::Error| e.to_string())
}

fn parse_policy(s: &str) -> std::result::Result<LabelPolicy, String> {
    s.parse()
}

fn parse_template(s: &str) -> std::result::Result<PromptTemplate, String> {
    s.parse()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

struct Loaded {
    source: OntologyDoc,
    target: OntologyDoc,
    lexicon: LexiconSource,
}

fn load_pair(pair: &PairArgs, common: &Common) -> Result<Loaded> {
    Ok(Loaded {
        source: load_doc(&pair.source, common.format, &common.annotation_props)?,
        target: load_doc(&pair.target, common.format, &common.annotation_props)?,
        lexicon: LexiconSource::new(common.wordnet.clone()),
    })
}

fn pipeline(spec: &str, common: &Common, lexicon: &LexiconSource) -> Result<Pipeline> {
    let keep = match &common.stop_keep {
        Some(path) => read_word_list(path)?,
        None => Default::default(),
    };
    build_pipeline(PipelineConfig::parse(spec)?, &keep, lexicon)
}

fn emit_alignment(alignment: &Alignment, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => Ok(save_alignment(path, alignment)?),
        None => {
            print!("{}", String::from_utf8_lossy(&write_alignment(alignment)));
            Ok(())
        }
    }
}

fn load_provider(spec: &str) -> Result<ProviderConfig> {
    if spec == "stub" {
        return Ok(ProviderConfig::stub());
    }
    let text = std::fs::read_to_string(spec).map_err(|e| CliError::io(format!("reading {spec}"), e))?;
    toml::from_str(&text).map_err(|source| CliError::Toml { path: spec.to_owned(), source })
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Match { pair, pipeline: spec, reserved, out, common } => {
            let loaded = load_pair(&pair, &common)?;
            let pipeline = pipeline(&spec, &common, &loaded.lexicon)?;
            let reserved = reserved.map(ReservedWordSet::read_from).transpose()?;
            let alignment = match_ontologies(
                &loaded.source,
                &loaded.target,
                &pipeline,
                reserved.as_ref(),
                common.label_policy,
            );
            emit_alignment(&alignment, out.as_deref())?;
            eprintln!("{} correspondences", alignment.len());
        }
        Command::Eval { alignment, reference, track, alignment_id, config_id, csv } => {
            let report = evaluate(&load_alignment(&alignment)?, &load_alignment(&reference)?);
            let alignment_id = alignment_id.unwrap_or_else(|| {
                alignment.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
            });
            let record = ReportRecord {
                track,
                alignment_id,
                config_id,
                pipeline: String::new(),
                repair: RepairMode::None,
                report,
                reserved_words: None,
                reserved_density: None,
                llm: None,
                provenance: Provenance {
                    input_sha256: sha256_hex(
                        format!(
                            "{}\n{}",
                            sha256_hex(&std::fs::read(&alignment).unwrap_or_default()),
                            sha256_hex(&std::fs::read(&reference).unwrap_or_default())
                        )
                        .as_bytes(),
                    ),
                    stop_list_sha256: english_stop_list_checksum(),
                    wordnet_sha256: None,
                    label_policy: String::new(),
                    category_pooling: String::new(),
                    alignment_file: alignment.display().to_string(),
                },
            };
            if csv {
                write_csv(std::io::stdout().lock(), std::slice::from_ref(&record))?;
            } else {
                println!("{}", serde_json::to_string_pretty(&record)?);
            }
        }
        Command::RepairLogic { pair, pipeline: spec, out, rematch, common } => {
            let loaded = load_pair(&pair, &common)?;
            let pipeline = pipeline(&spec, &common, &loaded.lexicon)?;
            let set = build_joint_reserved_set(
                &loaded.source,
                &loaded.target,
                &pipeline,
                common.label_policy,
            )?;
            match &out {
                Some(path) => set.write_to(path)?,
                None => print!("{}", set.to_file_string()),
            }
            eprintln!(
                "{} reserved words, density {:.4}",
                set.len(),
                reserved_density(&set, &loaded.source, &loaded.target)?
            );
            if let Some(path) = rematch {
                let alignment = match_ontologies(
                    &loaded.source,
                    &loaded.target,
                    &pipeline,
                    Some(&set),
                    common.label_policy,
                );
                save_alignment(&path, &alignment)?;
                eprintln!("{} correspondences after repair", alignment.len());
            }
        }
        Command::RepairLlm { alignment, pair, provider, template, cache, out, audit, common } => {
            let loaded = load_pair(&pair, &common)?;
            let config = load_provider(&provider)?;
            let client = config.connect()?;
            let cache = match cache {
                Some(path) => VerdictCache::open(path)?,
                None => VerdictCache::in_memory(),
            };
            let outcome = repair_alignment(
                &load_alignment(&alignment)?,
                &loaded.source,
                &loaded.target,
                client.as_ref(),
                &config,
                template,
                &cache,
                common.label_policy,
            )?;
            emit_alignment(&outcome.alignment, out.as_deref())?;
            if let Some(path) = audit {
                let mut lines = Vec::new();
                for record in &outcome.audits {
                    serde_json::to_writer(&mut lines, record)?;
                    lines.push(b'\n');
                }
                std::fs::write(&path, lines)
                    .map_err(|e| CliError::io(format!("writing {}", path.display()), e))?;
            }
            let summary = LlmSummary {
                template: template.to_string(),
                model: config.model_name.clone(),
                requests: outcome.requests,
                kept_by_keys: outcome.count(CellDecision::KeptByKeys),
                kept_yes: outcome.count(CellDecision::KeptYes),
                kept_unparseable: outcome.count(CellDecision::KeptUnparseable),
                removed: outcome.count(CellDecision::RemovedNo),
            };
            eprintln!("{}", serde_json::to_string(&summary)?);
        }
        Command::Sweep { config, jobs, out, template, cache, provider } => {
            let mut config = ExperimentConfig::load(&config)?;
            if let Some(jobs) = jobs {
                config.options.jobs = jobs;
            }
            if let Some(out) = out {
                config.output_dir = out;
            }
            if let Some(template) = template {
                config.options.template = template;
            }
            if let Some(cache) = cache {
                config.options.cache = Some(cache);
            }
            if let Some(provider) = provider {
                config.provider = Some(load_provider(&provider)?);
            }
            let summary = run_experiment(&config)?;
            eprintln!(
                "{} items done ({} resumed), {} failed; reports in {}",
                summary.records.len(),
                summary.resumed,
                summary.failures.len(),
                config.output_dir.display()
            );
            for failure in &summary.failures {
                eprintln!("  {} {}: {}", failure.alignment_id, failure.config_id, failure.message);
            }
            return Ok(summary.exit_code() as u8);
        }
        Command::ReservedDensity { reserved, pair, common } => {
            let loaded = load_pair(&pair, &common)?;
            let set = ReservedWordSet::read_from(&reserved)?;
            println!("{}", reserved_density(&set, &loaded.source, &loaded.target)?);
        }
    }
    Ok(0)
}
