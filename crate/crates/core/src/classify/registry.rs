//! Named classifier trainers. Evaluation conditions pick their classifier
//! from this registry by name.

use std::collections::BTreeMap;

use super::{predict, train_weighted_logreg, LabeledSample, LogRegConfig, LogRegModel};
use crate::error::{Error, Result};
use crate::eval::{majority_baseline, MajorityBaseline};
use crate::lexicon::Polarity;

pub trait SentimentClassifier: Send + Sync {
    fn predict(&self, features: &[f64]) -> Result<Polarity>;
}

pub trait ClassifierTrainer: Send + Sync {
    fn name(&self) -> &'static str;

    fn train(&self, samples: &[LabeledSample]) -> Result<Box<dyn SentimentClassifier>>;
}

impl SentimentClassifier for LogRegModel {
    fn predict(&self, features: &[f64]) -> Result<Polarity> {
        predict(self, features).map(|(label, _)| label)
    }
}

impl SentimentClassifier for MajorityBaseline {
    fn predict(&self, _features: &[f64]) -> Result<Polarity> {
        Ok(self.label())
    }
}

pub struct LogRegTrainer {
    pub config: LogRegConfig,
}

impl ClassifierTrainer for LogRegTrainer {
    fn name(&self) -> &'static str {
        "logreg"
    }

    fn train(&self, samples: &[LabeledSample]) -> Result<Box<dyn SentimentClassifier>> {
        Ok(Box::new(train_weighted_logreg(samples, &self.config)?))
    }
}

/// Always predicts the most frequent training label.
pub struct MajorityTrainer;

impl ClassifierTrainer for MajorityTrainer {
    fn name(&self) -> &'static str {
        "majority"
    }

    fn train(&self, samples: &[LabeledSample]) -> Result<Box<dyn SentimentClassifier>> {
        let labels: Vec<Polarity> = samples.iter().map(|s| s.label).collect();
        Ok(Box::new(majority_baseline(&labels)?))
    }
}

pub type TrainerFactory = fn(&LogRegConfig) -> Box<dyn ClassifierTrainer>;

pub struct ClassifierRegistry {
    factories: BTreeMap<&'static str, TrainerFactory>,
}

impl Default for ClassifierRegistry {
    fn default() -> Self {
        let mut registry = Self {
            factories: BTreeMap::new(),
        };
        registry.register("logreg", |config| {
            Box::new(LogRegTrainer { config: *config })
        });
        registry.register("majority", |_| Box::new(MajorityTrainer));
        registry
    }
}

impl ClassifierRegistry {
    pub fn register(&mut self, name: &'static str, factory: TrainerFactory) {
        self.factories.insert(name, factory);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.factories.keys().copied()
    }

    pub fn create(&self, name: &str, config: &LogRegConfig) -> Result<Box<dyn ClassifierTrainer>> {
        let factory = self
            .factories
            .get(name)
            .ok_or_else(|| Error::UnknownStrategy {
                name: name.to_string(),
                known: self.names().collect::<Vec<_>>().join(", "),
            })?;
        Ok(factory(config))
    }
}
