//! Lexical-translation EM aligner with an optional diagonal preference.
//!
//! The alignment prior for target position `j` is the diagonal factor
//! normalized over all candidate source positions (plus NULL, whose factor is
//! 1). The prior is fixed, so EM only re-estimates t(target | source) and the
//! corpus log-likelihood cannot decrease between iterations.

use std::collections::HashMap;

use rayon::prelude::*;

use super::{AlignerConfig, AlignmentLink, TranslationTable, NULL_WORD};
use crate::corpus::ParallelCorpus;
use crate::error::Result;

/// Interned view of the corpus: per pair, candidate source ids (NULL first
/// when enabled) and target ids.
struct Interned {
    pairs: Vec<(Vec<u32>, Vec<u32>)>,
    null_id: Option<u32>,
}

fn sorted_vocab<'a>(words: impl Iterator<Item = &'a String>, extra: Option<&str>) -> Vec<String> {
    let mut vocab: Vec<String> = words.cloned().collect();
    if let Some(e) = extra {
        vocab.push(e.to_string());
    }
    vocab.sort();
    vocab.dedup();
    vocab
}

fn build_structure(
    corpus: &ParallelCorpus,
    config: &AlignerConfig,
) -> (TranslationTable, Interned) {
    let source_vocab = sorted_vocab(
        corpus.pairs().iter().flat_map(|p| p.source_tokens.iter()),
        config.use_null.then_some(NULL_WORD),
    );
    let target_vocab = sorted_vocab(
        corpus.pairs().iter().flat_map(|p| p.target_tokens.iter()),
        None,
    );
    let s_index: HashMap<&str, u32> = source_vocab
        .iter()
        .enumerate()
        .map(|(i, w)| (w.as_str(), i as u32))
        .collect();
    let t_index: HashMap<&str, u32> = target_vocab
        .iter()
        .enumerate()
        .map(|(i, w)| (w.as_str(), i as u32))
        .collect();
    let null_id = config.use_null.then(|| s_index[NULL_WORD]);

    let mut rows: Vec<Vec<u32>> = vec![Vec::new(); source_vocab.len()];
    let mut pairs = Vec::with_capacity(corpus.len());
    for pair in corpus.pairs() {
        let src: Vec<u32> = pair
            .source_tokens
            .iter()
            .map(|w| s_index[w.as_str()])
            .collect();
        let tgt: Vec<u32> = pair
            .target_tokens
            .iter()
            .map(|w| t_index[w.as_str()])
            .collect();
        for &s in null_id.iter().chain(src.iter()) {
            rows[s as usize].extend(tgt.iter().copied());
        }
        pairs.push((src, tgt));
    }
    for row in &mut rows {
        row.sort_unstable();
        row.dedup();
    }
    let init = 1.0 / target_vocab.len() as f64;
    let table = TranslationTable::with_structure(source_vocab, target_vocab, rows, init);
    (table, Interned { pairs, null_id })
}

/// Normalized alignment prior over candidates for target position `j`:
/// NULL (if enabled) first, then source positions in order.
fn alignment_prior(
    config: &AlignerConfig,
    has_null: bool,
    src_len: usize,
    j: usize,
    tgt_len: usize,
) -> Vec<f64> {
    let mut prior = Vec::with_capacity(src_len + 1);
    if has_null {
        prior.push(1.0);
    }
    prior.extend((0..src_len).map(|i| config.diagonal_factor(i, src_len, j, tgt_len)));
    let z: f64 = prior.iter().sum();
    prior.iter_mut().for_each(|p| *p /= z);
    prior
}

/// Expected counts for one pair as (table entry, count), plus the pair's
/// log-likelihood under `table`.
fn expected_counts(
    table: &TranslationTable,
    config: &AlignerConfig,
    null_id: Option<u32>,
    src: &[u32],
    tgt: &[u32],
) -> (Vec<(usize, f64)>, f64) {
    let candidates: Vec<u32> = null_id.iter().chain(src.iter()).copied().collect();
    let mut counts = Vec::with_capacity(candidates.len() * tgt.len());
    let mut loglik = 0.0;
    let mut scratch = Vec::with_capacity(candidates.len());
    for (j, &t) in tgt.iter().enumerate() {
        let prior = alignment_prior(config, null_id.is_some(), src.len(), j, tgt.len());
        scratch.clear();
        let mut z = 0.0;
        for (k, &s) in candidates.iter().enumerate() {
            let entry = table
                .entry_index(s, t)
                .expect("co-occurring pair missing from table structure");
            let w = prior[k] * table.probs[entry];
            z += w;
            scratch.push((entry, w));
        }
        loglik += z.ln();
        if z > 0.0 {
            counts.extend(scratch.iter().map(|&(e, w)| (e, w / z)));
        }
    }
    (counts, loglik)
}

fn e_step(table: &TranslationTable, config: &AlignerConfig, data: &Interned) -> (Vec<f64>, f64) {
    let per_pair: Vec<(Vec<(usize, f64)>, f64)> = data
        .pairs
        .par_iter()
        .map(|(src, tgt)| expected_counts(table, config, data.null_id, src, tgt))
        .collect();
    // merged in pair order so the sums do not depend on the worker count
    let mut counts = vec![0.0; table.probs.len()];
    let mut loglik = 0.0;
    for (pair_counts, ll) in per_pair {
        for (e, c) in pair_counts {
            counts[e] += c;
        }
        loglik += ll;
    }
    (counts, loglik)
}

fn m_step(table: &mut TranslationTable, counts: &[f64]) {
    for s in 0..table.source_vocab.len() {
        let range = table.row_offsets[s]..table.row_offsets[s + 1];
        let total: f64 = counts[range.clone()].iter().sum();
        if total > 0.0 {
            for k in range {
                table.probs[k] = counts[k] / total;
            }
        } else {
            let n = range.len() as f64;
            for k in range {
                table.probs[k] = 1.0 / n;
            }
        }
    }
}

/// Trains the table for exactly `config.em_iterations` EM iterations from a
/// uniform start.
pub fn train_aligner(corpus: &ParallelCorpus, config: &AlignerConfig) -> Result<TranslationTable> {
    train_aligner_with(corpus, config, |_, _, _| {})
}

/// Like [`train_aligner`], calling `on_iteration(iteration, table, loglik)`
/// after every M-step. `loglik` is the corpus log-likelihood under the table
/// that entered that iteration.
pub fn train_aligner_with(
    corpus: &ParallelCorpus,
    config: &AlignerConfig,
    mut on_iteration: impl FnMut(usize, &TranslationTable, f64),
) -> Result<TranslationTable> {
    config.validate()?;
    let (mut table, data) = build_structure(corpus, config);
    for iter in 0..config.em_iterations {
        let (counts, loglik) = e_step(&table, config, &data);
        m_step(&mut table, &counts);
        on_iteration(iter + 1, &table, loglik);
    }
    Ok(table)
}

/// Corpus log-likelihood (nats) of the target sides given the source sides.
/// Pairs unknown to the table fall back to `config.prob_floor`.
pub fn corpus_log_likelihood(
    table: &TranslationTable,
    corpus: &ParallelCorpus,
    config: &AlignerConfig,
) -> f64 {
    let null_id = if config.use_null {
        table.source_id(NULL_WORD)
    } else {
        None
    };
    corpus
        .pairs()
        .iter()
        .map(|pair| {
            let src: Vec<Option<u32>> = pair
                .source_tokens
                .iter()
                .map(|w| table.source_id(w))
                .collect();
            let tgt_len = pair.target_tokens.len();
            pair.target_tokens
                .iter()
                .enumerate()
                .map(|(j, word)| {
                    let t = table.target_id(word);
                    let prior = alignment_prior(config, config.use_null, src.len(), j, tgt_len);
                    let mut z = 0.0;
                    let mut k = 0;
                    if config.use_null {
                        z += prior[0] * table.prob_by_id(null_id, t).unwrap_or(config.prob_floor);
                        k = 1;
                    }
                    for (i, s) in src.iter().enumerate() {
                        z += prior[k + i] * table.prob_by_id(*s, t).unwrap_or(config.prob_floor);
                    }
                    z.ln()
                })
                .sum::<f64>()
        })
        .sum()
}

/// Links every target position to its most probable source position (or
/// NULL). Ties go to the smallest source index; NULL wins only when strictly
/// better than every real position.
pub fn viterbi_align(
    table: &TranslationTable,
    corpus: &ParallelCorpus,
    config: &AlignerConfig,
) -> Vec<AlignmentLink> {
    let null_id = if config.use_null {
        table.source_id(NULL_WORD)
    } else {
        None
    };
    let per_pair: Vec<Vec<AlignmentLink>> = corpus
        .pairs()
        .par_iter()
        .enumerate()
        .map(|(pair_index, pair)| {
            let src: Vec<Option<u32>> = pair
                .source_tokens
                .iter()
                .map(|w| table.source_id(w))
                .collect();
            let src_len = src.len();
            let tgt_len = pair.target_tokens.len();
            pair.target_tokens
                .iter()
                .enumerate()
                .map(|(j, word)| {
                    let t = table.target_id(word);
                    let mut best: Option<usize> = None;
                    let mut best_score = f64::NEG_INFINITY;
                    for (i, s) in src.iter().enumerate() {
                        let score = table.prob_by_id(*s, t).unwrap_or(config.prob_floor)
                            * config.diagonal_factor(i, src_len, j, tgt_len);
                        if score > best_score {
                            best_score = score;
                            best = Some(i);
                        }
                    }
                    if config.use_null {
                        let null_score = table.prob_by_id(null_id, t).unwrap_or(config.prob_floor);
                        if null_score > best_score {
                            best = None;
                        }
                    }
                    AlignmentLink {
                        pair_index,
                        source_pos: best,
                        target_pos: j,
                    }
                })
                .collect()
        })
        .collect();
    per_pair.into_iter().flatten().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::VersePair;
    use crate::tag::LangDomainTag;

    pub(crate) fn corpus(pairs: &[(&str, &str)]) -> ParallelCorpus {
        let pairs = pairs
            .iter()
            .enumerate()
            .map(|(i, (s, t))| VersePair {
                verse_id: format!("v{i}"),
                source_tokens: s.split_whitespace().map(String::from).collect(),
                target_tokens: t.split_whitespace().map(String::from).collect(),
            })
            .collect();
        ParallelCorpus::from_pairs(
            LangDomainTag::new("fra", "bible").unwrap(),
            LangDomainTag::new("eng", "bible").unwrap(),
            pairs,
        )
        .unwrap()
    }

    fn no_null(iters: usize) -> AlignerConfig {
        AlignerConfig {
            em_iterations: iters,
            use_null: false,
            ..Default::default()
        }
    }

    #[test]
    fn article_converges_to_its_translation() {
        let c = corpus(&[("la", "the"), ("la maison", "the house")]);
        let table = train_aligner(&c, &no_null(5)).unwrap();
        assert!(table.prob("la", "the").unwrap() > 0.9);
        // frozen from a brute-force enumeration EM run
        assert!((table.prob("la", "the").unwrap() - 0.9551986360273029).abs() < 1e-12);
        assert!((table.prob("maison", "house").unwrap() - 0.8269586415563086).abs() < 1e-12);
    }

    #[test]
    fn single_pair_is_certain() {
        let table = train_aligner(&corpus(&[("a", "x")]), &no_null(5)).unwrap();
        assert_eq!(table.prob("a", "x"), Some(1.0));
    }

    #[test]
    fn second_word_takes_remaining_target() {
        let c = corpus(&[("a b", "x y"), ("a", "x")]);
        let table = train_aligner(&c, &no_null(5)).unwrap();
        assert_eq!(table.best_target("b").unwrap().0, "y");
    }

    #[test]
    fn viterbi_picks_argmax() {
        let c = corpus(&[("a b", "x")]);
        let table = TranslationTable::from_triples(vec![
            ("a".into(), "x".into(), 0.9),
            ("b".into(), "x".into(), 0.1),
        ]);
        let links = viterbi_align(&table, &c, &no_null(1));
        assert_eq!(
            links,
            vec![AlignmentLink {
                pair_index: 0,
                source_pos: Some(0),
                target_pos: 0
            }]
        );
    }

    #[test]
    fn viterbi_tie_goes_to_first_source() {
        let c = corpus(&[("a b", "x")]);
        let table = TranslationTable::from_triples(vec![
            ("a".into(), "x".into(), 0.5),
            ("b".into(), "x".into(), 0.5),
        ]);
        let links = viterbi_align(&table, &c, &no_null(1));
        assert_eq!(links[0].source_pos, Some(0));
    }

    #[test]
    fn viterbi_links_unknown_target_to_null() {
        let c = corpus(&[("a b", "zzz")]);
        let table = TranslationTable::from_triples(vec![
            ("a".into(), "x".into(), 1.0),
            ("b".into(), "x".into(), 1.0),
            (NULL_WORD.into(), "zzz".into(), 0.3),
        ]);
        let links = viterbi_align(&table, &c, &AlignerConfig::default());
        assert_eq!(links[0].source_pos, None);
    }

    #[test]
    fn diagonal_tension_prefers_monotone_links() {
        let c = corpus(&[("a b", "x y")]);
        let table = TranslationTable::from_triples(vec![
            ("a".into(), "x".into(), 0.5),
            ("a".into(), "y".into(), 0.5),
            ("b".into(), "x".into(), 0.5),
            ("b".into(), "y".into(), 0.5),
        ]);
        let config = AlignerConfig {
            diagonal_tension: 4.0,
            use_null: false,
            ..Default::default()
        };
        let links = viterbi_align(&table, &c, &config);
        assert_eq!(links[0].source_pos, Some(0));
        assert_eq!(links[1].source_pos, Some(1));
    }

    #[test]
    fn training_is_deterministic_and_normalized() {
        let c = corpus(&[
            ("a b c", "x y"),
            ("b c", "y z w"),
            ("a", "x"),
            ("c a", "w x"),
        ]);
        let config = AlignerConfig {
            diagonal_tension: 2.0,
            ..Default::default()
        };
        let mut last_ll = f64::NEG_INFINITY;
        let t1 = train_aligner_with(&c, &config, |_, table, ll| {
            assert!(table.max_normalization_error() < 1e-9);
            assert!(ll >= last_ll - 1e-12);
            last_ll = ll;
        })
        .unwrap();
        let t2 = train_aligner(&c, &config).unwrap();
        assert_eq!(t1, t2);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let c = corpus(&[("a", "x")]);
        let bad = AlignerConfig {
            em_iterations: 0,
            ..Default::default()
        };
        assert!(train_aligner(&c, &bad).is_err());
        let bad = AlignerConfig {
            prob_floor: 0.5,
            ..Default::default()
        };
        assert!(train_aligner(&c, &bad).is_err());
    }
}
