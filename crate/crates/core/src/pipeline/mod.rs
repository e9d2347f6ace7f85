//! End-to-end orchestration: align, project, drift, train, eval and
//! (optionally) emoticon evaluation, with every artifact recorded in a
//! digest manifest so completed stages can be skipped on resume.

mod config;

pub use config::{env_overrides, validate_config, RunConfig, ENV_PREFIX};

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::align::{load_pharaoh_alignments, write_pharaoh, AlignerOptions, AlignerRegistry};
use crate::classify::train_seed_model;
use crate::corpus::load_parallel_corpus;
use crate::embed::{compute_drift_table, DriftTable, EmbeddingSpace};
use crate::error::{Error, Result};
use crate::eval::{
    evaluate_emoticons, evaluate_word_sentiment, split_datasets, write_reports, EvalReport,
};
use crate::lexicon::SeedLexicon;
use crate::project::{extract_lexicon, substitute_and_count};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const ALIGNMENTS: &str = "alignments.pharaoh";
pub const TRANSLATION_TABLE: &str = "translation_table.tsv";
pub const LEXICON: &str = "unisent.tsv";
pub const DRIFT: &str = "drift.tsv";
pub const MODEL: &str = "model.json";
pub const EVAL: &str = "eval";
pub const EMOTICONS: &str = "emoticons";
pub const EMOTICON_DRIFT: &str = "emoticon_drift.tsv";
pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    /// Digest of the stage name, its parameters and its input digests.
    pub key: String,
    pub inputs: BTreeMap<String, String>,
    /// Output file name (relative to the output directory) to digest.
    pub outputs: BTreeMap<String, String>,
    pub wall_time_secs: f64,
    pub resumed: bool,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    /// False while the run is in progress or after a failed stage.
    pub complete: bool,
    pub config: RunConfig,
    pub stages: Vec<StageRecord>,
}

impl RunManifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Serde(e.to_string()))
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut text =
            serde_json::to_string_pretty(self).map_err(|e| Error::Serde(e.to_string()))?;
        text.push('\n');
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn stage(&self, name: &str) -> Option<&StageRecord> {
        self.stages.iter().find(|s| s.name == name)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &str> {
        self.stages
            .iter()
            .flat_map(|s| s.warnings.iter().map(String::as_str))
    }

    /// Output files whose current digest under `dir` differs from the
    /// recorded one (or that are missing).
    pub fn mismatched_outputs(&self, dir: impl AsRef<Path>) -> Vec<String> {
        let dir = dir.as_ref();
        self.stages
            .iter()
            .flat_map(|s| s.outputs.iter())
            .filter(|(name, digest)| file_digest(&dir.join(name)).ok().as_ref() != Some(*digest))
            .map(|(name, _)| name.clone())
            .collect()
    }
}

pub fn file_digest(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(bytes)))
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub resume: bool,
}

struct Runner {
    dir: PathBuf,
    previous: Option<RunManifest>,
    manifest: RunManifest,
}

impl Runner {
    fn stage<F>(
        &mut self,
        name: &str,
        inputs: &[&Path],
        params: serde_json::Value,
        outputs: &[&str],
        body: F,
    ) -> Result<()>
    where
        F: FnOnce(&Path) -> Result<Vec<String>>,
    {
        let wrap = |e: Error| Error::Stage {
            stage: name.to_string(),
            source: Box::new(e),
        };
        let mut input_digests = BTreeMap::new();
        let mut hasher = Sha256::new();
        hasher.update(name.as_bytes());
        hasher.update(b"\n");
        hasher.update(params.to_string().as_bytes());
        for path in inputs {
            let digest = file_digest(path).map_err(wrap)?;
            hasher.update(b"\n");
            hasher.update(digest.as_bytes());
            input_digests.insert(path.display().to_string(), digest);
        }
        let key = hex::encode(hasher.finalize());

        let reusable = self
            .previous
            .as_ref()
            .and_then(|m| m.stage(name))
            .filter(|r| {
                r.key == key
                    && r.outputs.len() == outputs.len()
                    && outputs.iter().all(|o| {
                        r.outputs.get(*o).is_some_and(|d| {
                            file_digest(&self.dir.join(o)).ok().as_ref() == Some(d)
                        })
                    })
            });
        let record = match reusable {
            Some(previous) => {
                log::info!("stage {name}: outputs up to date, skipping");
                StageRecord {
                    wall_time_secs: 0.0,
                    resumed: true,
                    ..previous.clone()
                }
            }
            None => {
                log::info!("stage {name}: running");
                let start = Instant::now();
                let warnings = body(&self.dir).map_err(wrap)?;
                let wall_time_secs = start.elapsed().as_secs_f64();
                let mut output_digests = BTreeMap::new();
                for o in outputs {
                    let digest = file_digest(&self.dir.join(o)).map_err(wrap)?;
                    output_digests.insert(o.to_string(), digest);
                }
                for w in &warnings {
                    log::warn!("{name}: {w}");
                }
                StageRecord {
                    name: name.to_string(),
                    key,
                    inputs: input_digests,
                    outputs: output_digests,
                    wall_time_secs,
                    resumed: false,
                    warnings,
                }
            }
        };
        self.manifest.stages.push(record);
        self.manifest.write(self.dir.join(MANIFEST)).map_err(wrap)
    }
}

fn json<T: Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).expect("configuration values serialize")
}

fn embedding_warnings(label: &str, space: &EmbeddingSpace) -> Vec<String> {
    let mut warnings = Vec::new();
    if space.duplicates() > 0 {
        warnings.push(format!(
            "{label}: {} duplicate words ignored",
            space.duplicates()
        ));
    }
    if space.zero_vectors() > 0 {
        warnings.push(format!(
            "{label}: {} zero vectors rejected",
            space.zero_vectors()
        ));
    }
    warnings
}

fn report_warnings(label: &str, reports: &[EvalReport]) -> Vec<String> {
    let mut warnings = Vec::new();
    for r in reports {
        if r.dropped_train > 0 || r.dropped_test > 0 {
            warnings.push(format!(
                "{label} {}: {} training and {} test words missing from the embedding",
                r.seed_source, r.dropped_train, r.dropped_test
            ));
        }
    }
    warnings
}

/// Runs every stage in order and returns the final manifest, which is also
/// written to `<output_dir>/manifest.json`.
pub fn run_pipeline(config: &RunConfig, options: &RunOptions) -> Result<RunManifest> {
    let problems = validate_config(config);
    if !problems.is_empty() {
        return Err(Error::Config(problems));
    }
    let dir = config.output_dir.clone();
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let manifest_path = dir.join(MANIFEST);
    let previous = if options.resume && manifest_path.is_file() {
        match RunManifest::load(&manifest_path) {
            Ok(m) if m.version == VERSION => Some(m),
            Ok(_) => None,
            Err(e) => {
                log::warn!("ignoring unreadable manifest: {e}");
                None
            }
        }
    } else {
        None
    };
    let mut runner = Runner {
        dir: dir.clone(),
        previous,
        manifest: RunManifest {
            version: VERSION.to_string(),
            complete: false,
            config: config.clone(),
            stages: Vec::new(),
        },
    };

    let source_tag = config.corpus_source_tag()?;
    let lexicon_tag = config.corpus_target_tag()?;
    let target_tag = config.target_domain_tag()?;
    let policy = config.tokenization();

    // align
    let mut align_inputs = vec![config.corpus.as_path()];
    let mut align_outputs = vec![ALIGNMENTS];
    if config.aligner == "pharaoh" {
        align_inputs.extend(config.pharaoh.as_deref());
    } else {
        align_outputs.push(TRANSLATION_TABLE);
    }
    runner.stage(
        "align",
        &align_inputs,
        json(&(
            &config.aligner,
            config.aligner_config(),
            policy,
            &source_tag,
            &lexicon_tag,
        )),
        &align_outputs,
        |dir| {
            let corpus = load_parallel_corpus(
                &config.corpus,
                source_tag.clone(),
                lexicon_tag.clone(),
                &policy,
            )?;
            let strategy = AlignerRegistry::default().create(
                &config.aligner,
                &AlignerOptions {
                    config: config.aligner_config(),
                    pharaoh_path: config.pharaoh.clone(),
                },
            )?;
            let output = strategy.align(&corpus)?;
            write_pharaoh(dir.join(ALIGNMENTS), &output.links, corpus.len())?;
            if let Some(table) = &output.table {
                table.write(dir.join(TRANSLATION_TABLE))?;
            }
            let mut warnings = Vec::new();
            if corpus.dropped() > 0 {
                warnings.push(format!("corpus: {} lines dropped", corpus.dropped()));
            }
            Ok(warnings)
        },
    )?;

    // project
    let alignments = dir.join(ALIGNMENTS);
    runner.stage(
        "project",
        &[&config.corpus, &alignments, &config.seeds],
        json(&(config.q, policy, &source_tag, &lexicon_tag)),
        &[LEXICON],
        |dir| {
            let corpus = load_parallel_corpus(
                &config.corpus,
                source_tag.clone(),
                lexicon_tag.clone(),
                &policy,
            )?;
            let links = load_pharaoh_alignments(dir.join(ALIGNMENTS), &corpus)?;
            let seeds = SeedLexicon::load(&config.seeds, source_tag.clone())?;
            let table = substitute_and_count(&links, &corpus, &seeds)?;
            if table.is_empty() {
                return Err(Error::NoSeedCoverage);
            }
            let lexicon = extract_lexicon(&table, config.q, lexicon_tag.clone())?;
            lexicon.write(dir.join(LEXICON))?;
            let mut warnings = Vec::new();
            if lexicon.is_empty() {
                warnings.push("no significant seed candidates".to_string());
            }
            Ok(warnings)
        },
    )?;

    // drift
    let lexicon_path = dir.join(LEXICON);
    runner.stage(
        "drift",
        &[
            &lexicon_path,
            &config.source_embedding,
            &config.target_embedding,
        ],
        json(&(config.drift_params(), &lexicon_tag, &target_tag)),
        &[DRIFT],
        |dir| {
            let lexicon = SeedLexicon::load(dir.join(LEXICON), lexicon_tag.clone())?;
            let source = EmbeddingSpace::load(&config.source_embedding, lexicon_tag.clone())?;
            let target = EmbeddingSpace::load(&config.target_embedding, target_tag.clone())?;
            let table =
                compute_drift_table(&lexicon, &source, &target, &config.drift_params(), None)?;
            table.write(dir.join(DRIFT))?;
            let mut warnings = embedding_warnings("source embedding", &source);
            warnings.extend(embedding_warnings("target embedding", &target));
            if !table.skipped.is_empty() {
                warnings.push(format!(
                    "drift: {} lexicon words missing from an embedding",
                    table.skipped.len()
                ));
            }
            Ok(warnings)
        },
    )?;

    // train
    let drift_path = dir.join(DRIFT);
    runner.stage(
        "train",
        &[&lexicon_path, &drift_path, &config.target_embedding],
        json(&(
            config.gamma,
            config.logreg_config(),
            config.tune_config(),
            config.lambda_floor,
        )),
        &[MODEL],
        |dir| {
            let lexicon = SeedLexicon::load(dir.join(LEXICON), lexicon_tag.clone())?;
            let drift = DriftTable::load(dir.join(DRIFT))?;
            let embedding = EmbeddingSpace::load(&config.target_embedding, target_tag.clone())?;
            let (doc, missing) =
                train_seed_model(&lexicon, Some(&drift), &embedding, &config.train_config())?;
            doc.write(dir.join(MODEL))?;
            let mut warnings = Vec::new();
            if !missing.is_empty() {
                warnings.push(format!(
                    "train: {} seeds missing from the target embedding",
                    missing.len()
                ));
            }
            Ok(warnings)
        },
    )?;

    // eval
    let eval_json = format!("{EVAL}.json");
    let eval_tsv = format!("{EVAL}_summary.tsv");
    runner.stage(
        "eval",
        &[
            &lexicon_path,
            &config.gold,
            &config.target_embedding,
            &drift_path,
        ],
        json(&(
            config.test_fraction,
            config.seed,
            config.eval_config(),
            &target_tag,
        )),
        &[&eval_json, &eval_tsv],
        |dir| {
            let lexicon = SeedLexicon::load(dir.join(LEXICON), lexicon_tag.clone())?;
            let gold = SeedLexicon::load(&config.gold, target_tag.clone())?;
            let embedding = EmbeddingSpace::load(&config.target_embedding, target_tag.clone())?;
            let drift = DriftTable::load(dir.join(DRIFT))?;
            let split = split_datasets(
                &lexicon,
                &gold,
                &embedding,
                config.test_fraction,
                config.seed,
            )?;
            let reports =
                evaluate_word_sentiment(&split, &embedding, Some(&drift), &config.eval_config())?;
            write_reports(dir, EVAL, &reports)?;
            Ok(report_warnings("eval", &reports))
        },
    )?;

    // eval-emoticons
    if let Some(emoticons) = &config.emoticons {
        let emoticon_tag = config.emoticon_domain_tag()?;
        let emb_path = config.emoticon_embedding_path();
        let separate_drift = emb_path != config.target_embedding;
        let json_name = format!("{EMOTICONS}.json");
        let tsv_name = format!("{EMOTICONS}_summary.tsv");
        let mut outputs = vec![json_name.as_str(), tsv_name.as_str()];
        let mut inputs = vec![lexicon_path.as_path(), emoticons.as_path(), emb_path];
        if separate_drift {
            outputs.push(EMOTICON_DRIFT);
            inputs.push(&config.source_embedding);
        } else {
            inputs.push(&drift_path);
        }
        runner.stage(
            "eval-emoticons",
            &inputs,
            json(&(config.eval_config(), config.drift_params(), &emoticon_tag)),
            &outputs,
            |dir| {
                let lexicon = SeedLexicon::load(dir.join(LEXICON), lexicon_tag.clone())?;
                let gold = SeedLexicon::load(emoticons, emoticon_tag.clone())?;
                let embedding = EmbeddingSpace::load(emb_path, emoticon_tag.clone())?;
                let mut warnings = embedding_warnings("emoticon embedding", &embedding);
                let drift = if separate_drift {
                    let source =
                        EmbeddingSpace::load(&config.source_embedding, lexicon_tag.clone())?;
                    let table = compute_drift_table(
                        &lexicon,
                        &source,
                        &embedding,
                        &config.drift_params(),
                        None,
                    )?;
                    table.write(dir.join(EMOTICON_DRIFT))?;
                    table
                } else {
                    DriftTable::load(dir.join(DRIFT))?
                };
                let reports = evaluate_emoticons(
                    &lexicon,
                    Some(&drift),
                    &embedding,
                    &gold,
                    &config.eval_config(),
                )?;
                write_reports(dir, EMOTICONS, &reports)?;
                warnings.extend(report_warnings("eval-emoticons", &reports));
                Ok(warnings)
            },
        )?;
    }

    runner.manifest.complete = true;
    runner.manifest.write(&manifest_path)?;
    Ok(runner.manifest)
}
