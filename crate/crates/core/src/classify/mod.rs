//! Word sentiment classification on embedding features.

mod logreg;
mod registry;
mod tune;

pub use logreg::{
    gradient, objective, predict, sigmoid, train_weighted_logreg, LabeledSample, LogRegConfig,
    LogRegModel,
};
pub use registry::{
    ClassifierRegistry, ClassifierTrainer, LogRegTrainer, MajorityTrainer, SentimentClassifier,
};
pub(crate) use tune::tune_on_samples;
pub use tune::{
    build_samples, drift_weights, stratified_folds, tune_weight_exponent, GridScore, TuneConfig,
    TuneResult,
};

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::embed::{DriftTable, EmbeddingSpace};
use crate::error::{Error, Result};
use crate::lexicon::SeedLexicon;

/// On-disk form of a trained model together with the settings that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub dim: usize,
    pub model: LogRegModel,
    pub gamma: f64,
    pub config: LogRegConfig,
    pub n_samples: usize,
    pub tuning: Option<TuneResult>,
}

impl ModelDocument {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serde(e.to_string()))
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut text = self.to_json()?;
        text.push('\n');
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let doc: Self = serde_json::from_str(&text).map_err(|e| Error::Serde(e.to_string()))?;
        if doc.model.coefficients.len() != doc.dim {
            return Err(Error::DimensionMismatch {
                expected: doc.dim,
                found: doc.model.coefficients.len(),
            });
        }
        Ok(doc)
    }
}

/// Settings for [`train_seed_model`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub logreg: LogRegConfig,
    /// Fixed weight exponent; tuned by cross-validation when absent.
    pub gamma: Option<f64>,
    pub tune: TuneConfig,
    pub lambda_floor: f64,
}

/// Fits the classifier on every seed present in `embedding`, weighting
/// samples by drift when a table is given. Returns the model and the seeds
/// that had no vector.
pub fn train_seed_model(
    lexicon: &SeedLexicon,
    drift: Option<&DriftTable>,
    embedding: &EmbeddingSpace,
    config: &TrainConfig,
) -> Result<(ModelDocument, Vec<String>)> {
    let (samples, missing) = build_samples(lexicon, embedding);
    let (gamma, l2, tuning) = match (config.gamma, drift) {
        (Some(g), _) => (g, config.logreg.l2, None),
        (None, None) => (0.0, config.logreg.l2, None),
        (None, Some(_)) => {
            let tuned = tune_on_samples(&samples, drift, &config.tune)?;
            (tuned.best_gamma, tuned.best_l2, Some(tuned))
        }
    };
    let words: Vec<&str> = samples.iter().map(|s| s.word.as_str()).collect();
    let weights = drift_weights(&words, drift, gamma, config.lambda_floor);
    let samples: Vec<LabeledSample> = samples
        .into_iter()
        .zip(weights)
        .map(|(s, weight)| LabeledSample { weight, ..s })
        .collect();
    let logreg = LogRegConfig {
        l2,
        ..config.logreg
    };
    let model = train_weighted_logreg(&samples, &logreg)?;
    let doc = ModelDocument {
        dim: embedding.dim(),
        model,
        gamma,
        config: logreg,
        n_samples: samples.len(),
        tuning,
    };
    Ok((doc, missing))
}
