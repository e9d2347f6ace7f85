//! Word profiles over a shared reference vocabulary, KL-based drift scores
//! and the inverse-drift sample weights derived from them.
//!
//! A word's profile in one space is its L1-normalized vector of cosine
//! distances to every word of the shared vocabulary. Drift is the KL
//! divergence (nats) from the source-space profile to the target-space one.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::EmbeddingSpace;
use crate::error::{Error, Result};
use crate::lexicon::SeedLexicon;
use crate::tag::LangDomainTag;

/// Words present in both spaces, in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct SharedVocab {
    words: Vec<String>,
}

impl SharedVocab {
    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    fn positions_in(&self, space: &EmbeddingSpace) -> Result<Vec<usize>> {
        self.words
            .iter()
            .map(|w| {
                space
                    .position(w)
                    .ok_or_else(|| Error::UnknownWord(w.clone()))
            })
            .collect()
    }
}

/// Intersects the two vocabularies. With `cap`, only the `cap` most frequent
/// shared words are kept, ranked by `freq` when given and by position in the
/// source file otherwise.
pub fn shared_vocab(
    source: &EmbeddingSpace,
    target: &EmbeddingSpace,
    cap: Option<usize>,
    freq: Option<&HashMap<String, u64>>,
) -> Result<SharedVocab> {
    let mut words: Vec<&String> = source
        .words()
        .iter()
        .filter(|w| target.contains(w))
        .collect();
    if words.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    if let Some(cap) = cap {
        // without counts, source file order already ranks by frequency
        if let Some(freq) = freq {
            words.sort_by(|a, b| {
                let fa = freq.get(*a).copied().unwrap_or(0);
                let fb = freq.get(*b).copied().unwrap_or(0);
                fb.cmp(&fa).then_with(|| a.cmp(b))
            });
        }
        words.truncate(cap);
    }
    let mut words: Vec<String> = words.into_iter().cloned().collect();
    words.sort();
    Ok(SharedVocab { words })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordProfile {
    pub word: String,
    pub tag: LangDomainTag,
    pub probs: Vec<f64>,
}

fn profile_from_positions(space: &EmbeddingSpace, word_pos: usize, refs: &[usize]) -> Vec<f64> {
    let mut dist: Vec<f64> = refs
        .iter()
        .map(|&r| {
            if r == word_pos {
                0.0
            } else {
                1.0 - space.cosine_at(word_pos, r)
            }
        })
        .collect();
    let total: f64 = dist.iter().sum();
    if total > 0.0 {
        dist.iter_mut().for_each(|d| *d /= total);
    } else {
        let others = refs.iter().filter(|&&r| r != word_pos).count();
        for (d, &r) in dist.iter_mut().zip(refs) {
            *d = if r == word_pos {
                0.0
            } else {
                1.0 / others as f64
            };
        }
    }
    dist
}

pub fn word_profile(
    space: &EmbeddingSpace,
    word: &str,
    shared: &SharedVocab,
) -> Result<WordProfile> {
    let pos = space
        .position(word)
        .ok_or_else(|| Error::UnknownWord(word.to_string()))?;
    if shared.len() < 2 {
        return Err(Error::Insufficient(
            "shared vocabulary needs at least 2 words".into(),
        ));
    }
    let refs = shared.positions_in(space)?;
    Ok(WordProfile {
        word: word.to_string(),
        tag: space.tag().clone(),
        probs: profile_from_positions(space, pos, &refs),
    })
}

fn kl_smoothed(p: &[f64], q: &[f64], epsilon: f64) -> f64 {
    let floor_sum = |v: &[f64]| v.iter().map(|&x| x.max(epsilon)).sum::<f64>();
    let (zp, zq) = (floor_sum(p), floor_sum(q));
    let kl: f64 = p
        .iter()
        .zip(q)
        .map(|(&pi, &qi)| {
            let ps = pi.max(epsilon) / zp;
            let qs = qi.max(epsilon) / zq;
            ps * (ps / qs).ln()
        })
        .sum();
    kl.max(0.0)
}

/// KL(p_source || p_target) in nats after flooring both profiles at
/// `epsilon` and renormalizing.
pub fn domdrift_score(p_source: &WordProfile, p_target: &WordProfile, epsilon: f64) -> Result<f64> {
    if p_source.probs.len() != p_target.probs.len() {
        return Err(Error::DimensionMismatch {
            expected: p_source.probs.len(),
            found: p_target.probs.len(),
        });
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be > 0, got {epsilon}"
        )));
    }
    Ok(kl_smoothed(&p_source.probs, &p_target.probs, epsilon))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftParams {
    pub gamma: f64,
    pub cap: Option<usize>,
    pub epsilon: f64,
    pub lambda_floor: f64,
}

impl Default for DriftParams {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            cap: None,
            epsilon: 1e-10,
            lambda_floor: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftEntry {
    pub lambda: f64,
    pub sample_weight: f64,
}

/// Per-word drift scores with mean-1 inverse-drift weights.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftTable {
    entries: BTreeMap<String, DriftEntry>,
    /// Lexicon words missing from one of the spaces.
    pub skipped: Vec<String>,
}

/// `(1 / max(lambda, floor))^gamma`.
pub(crate) fn raw_weight(lambda: f64, gamma: f64, lambda_floor: f64) -> f64 {
    if gamma == 0.0 {
        return 1.0;
    }
    (1.0 / lambda.max(lambda_floor)).powf(gamma)
}

/// Divides by the mean so the weights average exactly 1 when all are equal.
pub(crate) fn normalize_to_unit_mean(weights: &mut [f64]) {
    if weights.is_empty() {
        return;
    }
    let mean = weights.iter().sum::<f64>() / weights.len() as f64;
    weights.iter_mut().for_each(|w| *w /= mean);
}

impl DriftTable {
    pub fn from_lambdas(
        lambdas: BTreeMap<String, f64>,
        gamma: f64,
        lambda_floor: f64,
    ) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be finite and >= 0, got {gamma}"
            )));
        }
        if !(lambda_floor > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda_floor must be > 0, got {lambda_floor}"
            )));
        }
        if let Some((w, l)) = lambdas.iter().find(|(_, l)| !(l.is_finite() && **l >= 0.0)) {
            return Err(Error::InvalidParameter(format!("lambda for {w:?} is {l}")));
        }
        let mut weights: Vec<f64> = lambdas
            .values()
            .map(|&l| raw_weight(l, gamma, lambda_floor))
            .collect();
        normalize_to_unit_mean(&mut weights);
        let entries = lambdas
            .into_iter()
            .zip(weights)
            .map(|((word, lambda), sample_weight)| {
                (
                    word,
                    DriftEntry {
                        lambda,
                        sample_weight,
                    },
                )
            })
            .collect();
        Ok(Self {
            entries,
            skipped: Vec::new(),
        })
    }

    /// Same lambdas, weights recomputed for another exponent.
    pub fn reweighted(&self, gamma: f64, lambda_floor: f64) -> Result<Self> {
        let mut table = Self::from_lambdas(self.lambdas(), gamma, lambda_floor)?;
        table.skipped = self.skipped.clone();
        Ok(table)
    }

    pub fn lambdas(&self) -> BTreeMap<String, f64> {
        self.entries
            .iter()
            .map(|(w, e)| (w.clone(), e.lambda))
            .collect()
    }

    pub fn get(&self, word: &str) -> Option<&DriftEntry> {
        self.entries.get(word)
    }

    pub fn lambda(&self, word: &str) -> Option<f64> {
        self.entries.get(word).map(|e| e.lambda)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &DriftEntry)> {
        self.entries.iter().map(|(w, e)| (w.as_str(), e))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Words ordered by decreasing lambda (ties by word).
    pub fn ranked(&self) -> Vec<(&str, f64)> {
        let mut ranked: Vec<(&str, f64)> = self
            .entries
            .iter()
            .map(|(w, e)| (w.as_str(), e.lambda))
            .collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        ranked
    }

    /// `word<TAB>lambda<TAB>sample_weight` with 9 significant digits, sorted by word.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (word, e) in &self.entries {
            out.push_str(&format!(
                "{word}\t{:.8e}\t{:.8e}\n",
                e.lambda, e.sample_weight
            ));
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_tsv()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub(crate) fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 {
                return Err(Error::parse(
                    path,
                    idx + 1,
                    "expected word<TAB>lambda<TAB>sample_weight",
                ));
            }
            let num = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::parse(path, idx + 1, format!("bad number {s:?}")))
            };
            let lambda = num(cols[1])?;
            let sample_weight = num(cols[2])?;
            if lambda < 0.0 || sample_weight <= 0.0 {
                return Err(Error::parse(
                    path,
                    idx + 1,
                    "lambda must be >= 0 and weight > 0",
                ));
            }
            entries.insert(
                cols[0].to_string(),
                DriftEntry {
                    lambda,
                    sample_weight,
                },
            );
        }
        Ok(Self {
            entries,
            skipped: Vec::new(),
        })
    }
}

/// Scores every lexicon word present in both spaces. Profiles are taken over
/// the shared vocabulary of the two spaces.
pub fn compute_drift_table(
    lexicon: &SeedLexicon,
    source: &EmbeddingSpace,
    target: &EmbeddingSpace,
    params: &DriftParams,
    freq: Option<&HashMap<String, u64>>,
) -> Result<DriftTable> {
    if !(params.epsilon > 0.0 && params.epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be > 0, got {}",
            params.epsilon
        )));
    }
    let shared = shared_vocab(source, target, params.cap, freq)?;
    if shared.len() < 2 {
        return Err(Error::Insufficient(
            "shared vocabulary needs at least 2 words".into(),
        ));
    }
    let src_refs = shared.positions_in(source)?;
    let tgt_refs = shared.positions_in(target)?;

    let (present, skipped): (Vec<&str>, Vec<&str>) = lexicon
        .words()
        .partition(|w| source.contains(w) && target.contains(w));
    if present.is_empty() {
        return Err(Error::NoDriftCoverage);
    }
    let lambdas: Vec<f64> = present
        .par_iter()
        .map(|w| {
            let p = profile_from_positions(source, source.position(w).expect("checked"), &src_refs);
            let q = profile_from_positions(target, target.position(w).expect("checked"), &tgt_refs);
            kl_smoothed(&p, &q, params.epsilon)
        })
        .collect();
    let lambdas = present.iter().map(|w| w.to_string()).zip(lambdas).collect();
    let mut table = DriftTable::from_lambdas(lambdas, params.gamma, params.lambda_floor)?;
    table.skipped = skipped.into_iter().map(String::from).collect();
    Ok(table)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    pub word: String,
    pub source_neighbors: Vec<(String, f64)>,
    pub target_neighbors: Vec<(String, f64)>,
    /// Words appearing in both neighbor lists, sorted.
    pub overlap: Vec<String>,
}

fn nearest(space: &EmbeddingSpace, word: &str, k: usize) -> Result<Vec<(String, f64)>> {
    let pos = space
        .position(word)
        .ok_or_else(|| Error::UnknownWord(word.to_string()))?;
    let mut sims: Vec<(usize, f64)> = (0..space.len())
        .filter(|&i| i != pos)
        .map(|i| (i, space.cosine_at(pos, i)))
        .collect();
    sims.sort_by(|a, b| match b.1.total_cmp(&a.1) {
        Ordering::Equal => space.words()[a.0].cmp(&space.words()[b.0]),
        other => other,
    });
    sims.truncate(k);
    Ok(sims
        .into_iter()
        .map(|(i, s)| (space.words()[i].clone(), s))
        .collect())
}

/// Top-`k` cosine neighbors of `word` in each space.
pub fn drift_report(
    word: &str,
    source: &EmbeddingSpace,
    target: &EmbeddingSpace,
    k: usize,
) -> Result<DriftReport> {
    let source_neighbors = nearest(source, word, k)?;
    let target_neighbors = nearest(target, word, k)?;
    let src: BTreeSet<&str> = source_neighbors.iter().map(|(w, _)| w.as_str()).collect();
    let overlap = target_neighbors
        .iter()
        .map(|(w, _)| w.as_str())
        .filter(|w| src.contains(w))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(String::from)
        .collect();
    Ok(DriftReport {
        word: word.to_string(),
        source_neighbors,
        target_neighbors,
        overlap,
    })
}
