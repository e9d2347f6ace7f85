use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::Polarity;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub accuracy: f64,
    /// Unweighted mean of the positive and negative class F1.
    pub macro_f1: f64,
    pub positive: ClassMetrics,
    pub negative: ClassMetrics,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn class_metrics(predictions: &[Polarity], gold: &[Polarity], class: Polarity) -> ClassMetrics {
    let mut tp = 0;
    let mut predicted = 0;
    let mut actual = 0;
    for (&p, &g) in predictions.iter().zip(gold) {
        if p == class {
            predicted += 1;
        }
        if g == class {
            actual += 1;
        }
        if p == class && g == class {
            tp += 1;
        }
    }
    let precision = ratio(tp, predicted);
    let recall = ratio(tp, actual);
    // 2PR/(P+R) == 2TP/(predicted+actual), with 0/0 -> 0
    let f1 = ratio(2 * tp, predicted + actual);
    ClassMetrics {
        precision,
        recall,
        f1,
    }
}

/// Accuracy, per-class precision/recall/F1 (0/0 counts as 0) and macro-F1.
pub fn score(predictions: &[Polarity], gold: &[Polarity]) -> Result<Scores> {
    if predictions.len() != gold.len() {
        return Err(Error::DimensionMismatch {
            expected: gold.len(),
            found: predictions.len(),
        });
    }
    if gold.is_empty() {
        return Err(Error::EmptyInput("evaluation set".into()));
    }
    let correct = predictions.iter().zip(gold).filter(|(p, g)| p == g).count();
    let positive = class_metrics(predictions, gold, Polarity::Positive);
    let negative = class_metrics(predictions, gold, Polarity::Negative);
    Ok(Scores {
        accuracy: ratio(correct, gold.len()),
        macro_f1: (positive.f1 + negative.f1) / 2.0,
        positive,
        negative,
    })
}

/// Constant classifier returning the most frequent training label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MajorityBaseline(Polarity);

impl MajorityBaseline {
    pub fn label(&self) -> Polarity {
        self.0
    }
}

/// Ties go to the positive label.
pub fn majority_baseline(train_labels: &[Polarity]) -> Result<MajorityBaseline> {
    if train_labels.is_empty() {
        return Err(Error::EmptyInput("baseline training labels".into()));
    }
    let positives = train_labels
        .iter()
        .filter(|&&l| l == Polarity::Positive)
        .count();
    let label = if 2 * positives >= train_labels.len() {
        Polarity::Positive
    } else {
        Polarity::Negative
    };
    Ok(MajorityBaseline(label))
}
