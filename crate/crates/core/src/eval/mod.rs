//! Evaluation protocol: lexicon splits, baselines, metrics and the
//! word-sentiment and emoticon evaluation conditions.

mod metrics;
mod split;

pub use metrics::{majority_baseline, score, ClassMetrics, MajorityBaseline, Scores};
pub use split::{split_datasets, SplitSpec, Vocab, SIZE_TOLERANCE};

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classify::{
    drift_weights, ClassifierRegistry, LabeledSample, LogRegConfig, TuneConfig, TuneResult,
};
use crate::embed::{DriftTable, EmbeddingSpace};
use crate::error::{Error, Result};
use crate::lexicon::{Polarity, SeedLexicon};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub logreg: LogRegConfig,
    /// Exponent for the drift-weighted condition; tuned by cross-validation
    /// on the training seeds when absent.
    pub gamma: Option<f64>,
    pub tune: TuneConfig,
    pub lambda_floor: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            logreg: LogRegConfig::default(),
            gamma: None,
            tune: TuneConfig::default(),
            lambda_floor: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerClass {
    pub positive: ClassMetrics,
    pub negative: ClassMetrics,
}

/// Settings that produced one report row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub classifier: String,
    pub l2: f64,
    pub gamma: Option<f64>,
    pub lambda_floor: f64,
    pub tol: f64,
    pub max_iters: usize,
    pub split_seed: Option<u64>,
    /// Convention for per-class F1 when precision and recall are both 0/0.
    pub zero_division_f1: f64,
    pub tuning: Option<TuneResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub language: String,
    pub domain: String,
    pub seed_source: String,
    pub n_train: usize,
    pub n_test: usize,
    pub accuracy: f64,
    pub macro_f1: f64,
    pub per_class: PerClass,
    pub dropped_train: usize,
    pub dropped_test: usize,
    pub config: ConfigEcho,
}

fn samples_from(
    words: &BTreeMap<String, Polarity>,
    embedding: &EmbeddingSpace,
) -> (Vec<LabeledSample>, usize) {
    let mut dropped = 0;
    let samples = words
        .iter()
        .filter_map(|(w, &label)| match embedding.vector(w) {
            Some(v) => Some(LabeledSample {
                word: w.clone(),
                features: v.to_vec(),
                label,
                weight: 1.0,
            }),
            None => {
                dropped += 1;
                None
            }
        })
        .collect();
    (samples, dropped)
}

fn lexicon_map(lexicon: &SeedLexicon) -> BTreeMap<String, Polarity> {
    lexicon
        .iter()
        .map(|(w, e)| (w.to_string(), e.polarity))
        .collect()
}

struct Condition<'a> {
    seed_source: &'static str,
    classifier: &'static str,
    train: &'a [LabeledSample],
    dropped_train: usize,
    logreg: LogRegConfig,
    gamma: Option<f64>,
    tuning: Option<TuneResult>,
}

struct TestSet<'a> {
    samples: &'a [LabeledSample],
    dropped: usize,
    split_seed: Option<u64>,
}

fn run_condition(
    registry: &ClassifierRegistry,
    embedding: &EmbeddingSpace,
    condition: Condition<'_>,
    test: &TestSet<'_>,
    lambda_floor: f64,
) -> Result<EvalReport> {
    let trainer = registry.create(condition.classifier, &condition.logreg)?;
    let model = trainer.train(condition.train)?;
    let predictions = test
        .samples
        .iter()
        .map(|s| model.predict(&s.features))
        .collect::<Result<Vec<_>>>()?;
    let gold: Vec<Polarity> = test.samples.iter().map(|s| s.label).collect();
    let scores = score(&predictions, &gold)?;
    Ok(EvalReport {
        language: embedding.tag().language().to_string(),
        domain: embedding.tag().domain().to_string(),
        seed_source: condition.seed_source.to_string(),
        n_train: condition.train.len(),
        n_test: test.samples.len(),
        accuracy: scores.accuracy,
        macro_f1: scores.macro_f1,
        per_class: PerClass {
            positive: scores.positive,
            negative: scores.negative,
        },
        dropped_train: condition.dropped_train,
        dropped_test: test.dropped,
        config: ConfigEcho {
            classifier: condition.classifier.to_string(),
            l2: condition.logreg.l2,
            gamma: condition.gamma,
            lambda_floor,
            tol: condition.logreg.tol,
            max_iters: condition.logreg.max_iters,
            split_seed: test.split_seed,
            zero_division_f1: 0.0,
            tuning: condition.tuning,
        },
    })
}

fn plain<'a>(
    seed_source: &'static str,
    classifier: &'static str,
    train: &'a [LabeledSample],
    dropped_train: usize,
    config: &EvalConfig,
) -> Condition<'a> {
    Condition {
        seed_source,
        classifier,
        train,
        dropped_train,
        logreg: config.logreg,
        gamma: None,
        tuning: None,
    }
}

/// Trains the drift-weighted variant of `train`: weights from `drift` at the
/// configured exponent, or at the cross-validated one.
fn weighted_condition(
    train: &[LabeledSample],
    drift: &DriftTable,
    config: &EvalConfig,
) -> Result<(Vec<LabeledSample>, LogRegConfig, f64, Option<TuneResult>)> {
    let (gamma, l2, tuning) = match config.gamma {
        Some(g) => (g, config.logreg.l2, None),
        None => {
            let tuned = crate::classify::tune_on_samples(train, Some(drift), &config.tune)?;
            (tuned.best_gamma, tuned.best_l2, Some(tuned))
        }
    };
    let words: Vec<&str> = train.iter().map(|s| s.word.as_str()).collect();
    let weights = drift_weights(&words, Some(drift), gamma, config.lambda_floor);
    let weighted = train
        .iter()
        .zip(weights)
        .map(|(s, w)| LabeledSample {
            weight: w,
            ..s.clone()
        })
        .collect();
    let logreg = LogRegConfig {
        l2,
        ..config.logreg
    };
    Ok((weighted, logreg, gamma, tuning))
}

/// Scores the majority baseline and logistic regression trained on the
/// manual seeds, the induced seeds, and (when `drift` is given) the
/// drift-weighted induced seeds, all on the same test words.
pub fn evaluate_word_sentiment(
    split: &SplitSpec,
    embedding: &EmbeddingSpace,
    drift: Option<&DriftTable>,
    config: &EvalConfig,
) -> Result<Vec<EvalReport>> {
    let registry = ClassifierRegistry::default();
    let (test_samples, dropped_test) = samples_from(&split.test, embedding);
    if test_samples.is_empty() {
        return Err(Error::Insufficient(
            "no test word is present in the embedding".into(),
        ));
    }
    let test = TestSet {
        samples: &test_samples,
        dropped: dropped_test,
        split_seed: Some(split.rng_seed),
    };
    let (manual, dropped_manual) = samples_from(&split.manual_train, embedding);
    let (unisent, dropped_unisent) = samples_from(&split.unisent_train, embedding);

    let floor = config.lambda_floor;
    let mut reports = vec![
        run_condition(
            &registry,
            embedding,
            plain("baseline", "majority", &manual, dropped_manual, config),
            &test,
            floor,
        )?,
        run_condition(
            &registry,
            embedding,
            plain("manual", "logreg", &manual, dropped_manual, config),
            &test,
            floor,
        )?,
        run_condition(
            &registry,
            embedding,
            plain("unisent", "logreg", &unisent, dropped_unisent, config),
            &test,
            floor,
        )?,
    ];
    if let Some(drift) = drift {
        let (weighted, logreg, gamma, tuning) = weighted_condition(&unisent, drift, config)?;
        reports.push(run_condition(
            &registry,
            embedding,
            Condition {
                seed_source: "unisent_weighted",
                classifier: "logreg",
                train: &weighted,
                dropped_train: dropped_unisent,
                logreg,
                gamma: Some(gamma),
                tuning,
            },
            &test,
            config.lambda_floor,
        )?);
    }
    Ok(reports)
}

/// Trains on every usable induced seed and predicts the polarity of
/// emoticon tokens of the target-domain embedding.
pub fn evaluate_emoticons(
    unisent: &SeedLexicon,
    drift: Option<&DriftTable>,
    twitter_emb: &EmbeddingSpace,
    emoticon_gold: &SeedLexicon,
    config: &EvalConfig,
) -> Result<Vec<EvalReport>> {
    let registry = ClassifierRegistry::default();
    let (test_samples, dropped_test) = samples_from(&lexicon_map(emoticon_gold), twitter_emb);
    if test_samples.is_empty() {
        return Err(Error::Insufficient(
            "no emoticon is present in the embedding".into(),
        ));
    }
    let test = TestSet {
        samples: &test_samples,
        dropped: dropped_test,
        split_seed: None,
    };
    let (train, dropped_train) = samples_from(&lexicon_map(unisent), twitter_emb);
    let floor = config.lambda_floor;
    let mut reports = vec![
        run_condition(
            &registry,
            twitter_emb,
            plain("baseline", "majority", &train, dropped_train, config),
            &test,
            floor,
        )?,
        run_condition(
            &registry,
            twitter_emb,
            plain("unisent", "logreg", &train, dropped_train, config),
            &test,
            floor,
        )?,
    ];
    if let Some(drift) = drift {
        let (weighted, logreg, gamma, tuning) = weighted_condition(&train, drift, config)?;
        reports.push(run_condition(
            &registry,
            twitter_emb,
            Condition {
                seed_source: "unisent_weighted",
                classifier: "logreg",
                train: &weighted,
                dropped_train,
                logreg,
                gamma: Some(gamma),
                tuning,
            },
            &test,
            config.lambda_floor,
        )?);
    }
    Ok(reports)
}

pub fn reports_to_json(reports: &[EvalReport]) -> Result<String> {
    let mut text =
        serde_json::to_string_pretty(reports).map_err(|e| Error::Serde(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// `condition<TAB>acc<TAB>macro_f1` summary rows.
pub fn reports_to_tsv(reports: &[EvalReport]) -> String {
    let mut out = String::from("condition\tacc\tmacro_f1\n");
    for r in reports {
        out.push_str(&format!(
            "{}\t{:.4}\t{:.4}\n",
            r.seed_source, r.accuracy, r.macro_f1
        ));
    }
    out
}

/// Writes `<stem>.json` and `<stem>_summary.tsv` into `dir`.
pub fn write_reports(dir: impl AsRef<Path>, stem: &str, reports: &[EvalReport]) -> Result<()> {
    let dir = dir.as_ref();
    let json = dir.join(format!("{stem}.json"));
    fs::write(&json, reports_to_json(reports)?).map_err(|e| Error::io(&json, e))?;
    let tsv = dir.join(format!("{stem}_summary.tsv"));
    fs::write(&tsv, reports_to_tsv(reports)).map_err(|e| Error::io(&tsv, e))
}

pub fn load_reports(path: impl AsRef<Path>) -> Result<Vec<EvalReport>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Serde(e.to_string()))
}
