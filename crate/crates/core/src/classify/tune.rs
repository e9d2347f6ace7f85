//! Cross-validated choice of the drift-weight exponent (and l2 strength).

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{train_weighted_logreg, LabeledSample, LogRegConfig, SentimentClassifier};
use crate::embed::{DriftTable, EmbeddingSpace};
use crate::error::{Error, Result};
use crate::eval::score;
use crate::lexicon::{Polarity, SeedLexicon};

/// One sample per lexicon word found in `embedding`, with unit weight.
/// Returns the samples (in word order) and the words that were missing.
pub fn build_samples(
    lexicon: &SeedLexicon,
    embedding: &EmbeddingSpace,
) -> (Vec<LabeledSample>, Vec<String>) {
    let mut samples = Vec::new();
    let mut missing = Vec::new();
    for (word, entry) in lexicon.iter() {
        match embedding.vector(word) {
            Some(v) => samples.push(LabeledSample {
                word: word.to_string(),
                features: v.to_vec(),
                label: entry.polarity,
                weight: 1.0,
            }),
            None => missing.push(word.to_string()),
        }
    }
    (samples, missing)
}

/// Mean-1 sample weights `(1 / max(lambda, floor))^gamma` for `words`.
/// Words without a drift score get the mean raw weight of those that have
/// one. `gamma == 0` (or no drift table) gives exactly 1 for every word.
pub fn drift_weights(
    words: &[&str],
    drift: Option<&DriftTable>,
    gamma: f64,
    lambda_floor: f64,
) -> Vec<f64> {
    let Some(drift) = drift.filter(|_| gamma != 0.0) else {
        return vec![1.0; words.len()];
    };
    let raw: Vec<Option<f64>> = words
        .iter()
        .map(|w| {
            drift
                .lambda(w)
                .map(|l| crate::embed::drift_raw_weight(l, gamma, lambda_floor))
        })
        .collect();
    let known: Vec<f64> = raw.iter().flatten().copied().collect();
    if known.is_empty() {
        return vec![1.0; words.len()];
    }
    let fill = known.iter().sum::<f64>() / known.len() as f64;
    let mut weights: Vec<f64> = raw.into_iter().map(|w| w.unwrap_or(fill)).collect();
    crate::embed::normalize_weights(&mut weights);
    weights
}

/// Assigns each sample to a fold, stratified by label. Within each class the
/// order is shuffled with a ChaCha8 generator seeded by `seed`.
pub fn stratified_folds(labels: &[Polarity], folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::InvalidParameter(format!(
            "folds must be >= 2, got {folds}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0; labels.len()];
    for class in Polarity::BOTH {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.len() < folds {
            return Err(Error::Insufficient(format!(
                "{} {class} samples cannot be stratified into {folds} folds",
                members.len()
            )));
        }
        members.shuffle(&mut rng);
        for (pos, idx) in members.into_iter().enumerate() {
            assignment[idx] = pos % folds;
        }
    }
    Ok(assignment)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneConfig {
    pub gamma_grid: Vec<f64>,
    pub l2_grid: Vec<f64>,
    pub folds: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_iters: usize,
    pub lambda_floor: f64,
}

impl Default for TuneConfig {
    fn default() -> Self {
        let logreg = LogRegConfig::default();
        Self {
            gamma_grid: vec![0.0, 0.5, 1.0, 2.0],
            l2_grid: vec![logreg.l2],
            folds: 5,
            seed: 13,
            tol: 1e-6,
            max_iters: logreg.max_iters,
            lambda_floor: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridScore {
    pub gamma: f64,
    pub l2: f64,
    pub mean_macro_f1: f64,
    pub fold_macro_f1: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneResult {
    pub best_gamma: f64,
    pub best_l2: f64,
    pub folds: usize,
    pub seed: u64,
    pub scores: Vec<GridScore>,
}

fn fold_macro_f1(
    samples: &[LabeledSample],
    assignment: &[usize],
    fold: usize,
    drift: Option<&DriftTable>,
    gamma: f64,
    config: &LogRegConfig,
    lambda_floor: f64,
) -> Result<f64> {
    let mut held_out = Vec::new();
    let mut train = Vec::new();
    for (s, &f) in samples.iter().zip(assignment) {
        if f == fold {
            held_out.push(s);
        } else {
            train.push(s);
        }
    }
    let words: Vec<&str> = train.iter().map(|s| s.word.as_str()).collect();
    let weights = drift_weights(&words, drift, gamma, lambda_floor);
    let train: Vec<LabeledSample> = train
        .into_iter()
        .zip(weights)
        .map(|(s, w)| LabeledSample {
            weight: w,
            ..s.clone()
        })
        .collect();
    let model = train_weighted_logreg(&train, config)?;
    let predictions = held_out
        .iter()
        .map(|s| model.predict(&s.features))
        .collect::<Result<Vec<_>>>()?;
    let gold: Vec<Polarity> = held_out.iter().map(|s| s.label).collect();
    Ok(score(&predictions, &gold)?.macro_f1)
}

/// Stratified k-fold search over `gamma_grid x l2_grid` on the seed lexicon,
/// maximizing mean held-out macro-F1. Ties prefer the smaller gamma, then the
/// smaller l2.
pub fn tune_weight_exponent(
    lexicon: &SeedLexicon,
    drift: Option<&DriftTable>,
    embedding: &EmbeddingSpace,
    config: &TuneConfig,
) -> Result<TuneResult> {
    let (samples, _) = build_samples(lexicon, embedding);
    tune_on_samples(&samples, drift, config)
}

pub(crate) fn tune_on_samples(
    samples: &[LabeledSample],
    drift: Option<&DriftTable>,
    config: &TuneConfig,
) -> Result<TuneResult> {
    if config.gamma_grid.is_empty() || config.l2_grid.is_empty() {
        return Err(Error::InvalidParameter("tuning grid is empty".into()));
    }
    if let Some(g) = config
        .gamma_grid
        .iter()
        .find(|g| !(g.is_finite() && **g >= 0.0))
    {
        return Err(Error::InvalidParameter(format!(
            "gamma {g} must be finite and >= 0"
        )));
    }
    let labels: Vec<Polarity> = samples.iter().map(|s| s.label).collect();
    let assignment = stratified_folds(&labels, config.folds, config.seed)?;

    let grid: Vec<(f64, f64)> = config
        .gamma_grid
        .iter()
        .flat_map(|&g| config.l2_grid.iter().map(move |&l| (g, l)))
        .collect();
    let jobs: Vec<(usize, usize)> = (0..grid.len())
        .flat_map(|c| (0..config.folds).map(move |f| (c, f)))
        .collect();
    let results: Vec<f64> = jobs
        .par_iter()
        .map(|&(c, fold)| {
            let (gamma, l2) = grid[c];
            let logreg = LogRegConfig {
                l2,
                tol: config.tol,
                max_iters: config.max_iters,
            };
            fold_macro_f1(
                samples,
                &assignment,
                fold,
                drift,
                gamma,
                &logreg,
                config.lambda_floor,
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let scores: Vec<GridScore> = grid
        .iter()
        .enumerate()
        .map(|(c, &(gamma, l2))| {
            let fold_macro_f1 = results[c * config.folds..(c + 1) * config.folds].to_vec();
            let mean_macro_f1 = fold_macro_f1.iter().sum::<f64>() / config.folds as f64;
            GridScore {
                gamma,
                l2,
                mean_macro_f1,
                fold_macro_f1,
            }
        })
        .collect();

    let best = scores
        .iter()
        .reduce(|best, s| {
            let better = s.mean_macro_f1 > best.mean_macro_f1
                || (s.mean_macro_f1 == best.mean_macro_f1
                    && (s.gamma < best.gamma || (s.gamma == best.gamma && s.l2 < best.l2)));
            if better {
                s
            } else {
                best
            }
        })
        .expect("grid is non-empty");
    Ok(TuneResult {
        best_gamma: best.gamma,
        best_l2: best.l2,
        folds: config.folds,
        seed: config.seed,
        scores,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn folds_are_stratified_and_seeded() {
        let labels: Vec<Polarity> = (0..20)
            .map(|i| {
                if i % 4 == 0 {
                    Polarity::Negative
                } else {
                    Polarity::Positive
                }
            })
            .collect();
        let a = stratified_folds(&labels, 5, 7).unwrap();
        assert_eq!(a, stratified_folds(&labels, 5, 7).unwrap());
        for fold in 0..5 {
            let neg = (0..20)
                .filter(|&i| a[i] == fold && labels[i] == Polarity::Negative)
                .count();
            assert_eq!(neg, 1);
        }
        assert!(stratified_folds(&labels[..8], 5, 7).is_err());
        assert!(stratified_folds(&labels, 1, 7).is_err());
    }

    #[test]
    fn weights_fill_missing_words_and_average_one() {
        let drift = DriftTable::from_lambdas(
            BTreeMap::from([("a".to_string(), 0.5), ("b".to_string(), 2.0)]),
            1.0,
            1e-6,
        )
        .unwrap();
        let w = drift_weights(&["a", "b", "c"], Some(&drift), 1.0, 1e-6);
        // raw 2, 0.5, fill 1.25 -> mean 1.25
        assert_eq!(w, vec![1.6, 0.4, 1.0]);
        assert_eq!(
            drift_weights(&["a", "b"], Some(&drift), 0.0, 1e-6),
            vec![1.0, 1.0]
        );
        assert_eq!(drift_weights(&["a"], None, 2.0, 1e-6), vec![1.0]);
    }
}
