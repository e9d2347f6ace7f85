//! Train/test partition of the induced and gold lexicons.
//!
//! With U the induced lexicon, G the gold lexicon and E the embedding
//! vocabulary: C = U ∩ G ∩ E, A = (U ∩ E) \ C, B = (G ∩ E) \ C. Test words are
//! sampled from B ∪ C and removed from both training sets.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embed::EmbeddingSpace;
use crate::error::{Error, Result};
use crate::lexicon::{Polarity, SeedLexicon};

/// Anything that can answer vocabulary membership.
pub trait Vocab {
    fn contains_word(&self, word: &str) -> bool;
}

impl Vocab for EmbeddingSpace {
    fn contains_word(&self, word: &str) -> bool {
        self.contains(word)
    }
}

impl Vocab for BTreeSet<String> {
    fn contains_word(&self, word: &str) -> bool {
        self.contains(word)
    }
}

impl Vocab for HashSet<String> {
    fn contains_word(&self, word: &str) -> bool {
        self.contains(word)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub set_a: BTreeSet<String>,
    pub set_b: BTreeSet<String>,
    pub set_c: BTreeSet<String>,
    /// Labels from the induced lexicon.
    pub unisent_train: BTreeMap<String, Polarity>,
    /// Labels from the gold lexicon.
    pub manual_train: BTreeMap<String, Polarity>,
    /// Labels from the gold lexicon.
    pub test: BTreeMap<String, Polarity>,
    pub rng_seed: u64,
}

/// Relative size difference tolerated between the two training sets.
pub const SIZE_TOLERANCE: f64 = 0.05;

fn downsample(set: &mut BTreeMap<String, Polarity>, size: usize, rng: &mut ChaCha8Rng) {
    let words: Vec<String> = set.keys().cloned().collect();
    let keep: BTreeSet<usize> = sample(rng, words.len(), size).into_iter().collect();
    for (i, w) in words.iter().enumerate() {
        if !keep.contains(&i) {
            set.remove(w);
        }
    }
}

pub fn split_datasets(
    unisent: &SeedLexicon,
    gold: &SeedLexicon,
    emb_vocab: &dyn Vocab,
    test_fraction: f64,
    seed: u64,
) -> Result<SplitSpec> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "test_fraction must be in (0, 1), got {test_fraction}"
        )));
    }
    if unisent.is_empty() || gold.is_empty() {
        return Err(Error::EmptyInput("lexicon".into()));
    }
    let u: BTreeSet<String> = unisent
        .words()
        .filter(|w| emb_vocab.contains_word(w))
        .map(String::from)
        .collect();
    let g: BTreeSet<String> = gold
        .words()
        .filter(|w| emb_vocab.contains_word(w))
        .map(String::from)
        .collect();
    let set_c: BTreeSet<String> = u.intersection(&g).cloned().collect();
    if set_c.is_empty() {
        return Err(Error::Insufficient(
            "induced lexicon, gold lexicon and embedding vocabulary do not intersect".into(),
        ));
    }
    let set_a: BTreeSet<String> = u.difference(&set_c).cloned().collect();
    let set_b: BTreeSet<String> = g.difference(&set_c).cloned().collect();

    let pool: Vec<&String> = g.iter().collect();
    let n_test = (test_fraction * pool.len() as f64).round() as usize;
    if n_test == 0 {
        return Err(Error::Insufficient(
            "test set is empty after sampling".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let test_idx: BTreeSet<usize> = sample(&mut rng, pool.len(), n_test).into_iter().collect();
    let test: BTreeMap<String, Polarity> = test_idx
        .iter()
        .map(|&i| (pool[i].clone(), gold.polarity(pool[i]).expect("gold word")))
        .collect();

    let mut manual_train: BTreeMap<String, Polarity> = g
        .iter()
        .filter(|w| !test.contains_key(*w))
        .map(|w| (w.clone(), gold.polarity(w).expect("gold word")))
        .collect();
    let mut unisent_train: BTreeMap<String, Polarity> = u
        .iter()
        .filter(|w| !test.contains_key(*w))
        .map(|w| (w.clone(), unisent.polarity(w).expect("induced word")))
        .collect();
    if manual_train.is_empty() || unisent_train.is_empty() {
        return Err(Error::Insufficient(
            "a training set is empty after removing test words".into(),
        ));
    }

    let (nu, nm) = (unisent_train.len(), manual_train.len());
    let larger = nu.max(nm);
    if (nu.abs_diff(nm)) as f64 > SIZE_TOLERANCE * larger as f64 {
        if nu > nm {
            downsample(&mut unisent_train, nm, &mut rng);
        } else {
            downsample(&mut manual_train, nu, &mut rng);
        }
    }

    Ok(SplitSpec {
        set_a,
        set_b,
        set_c,
        unisent_train,
        manual_train,
        test,
        rng_seed: seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tag::LangDomainTag;
    use proptest::prelude::*;

    fn lex(entries: &[(&str, Polarity)]) -> SeedLexicon {
        let mut l = SeedLexicon::new(LangDomainTag::new("fra", "bible").unwrap());
        for (w, p) in entries {
            l.insert(*w, *p, 1.0).unwrap();
        }
        l
    }

    fn vocab(words: &[&str]) -> BTreeSet<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    use Polarity::{Negative as N, Positive as P};

    #[test]
    fn set_algebra() {
        let u = lex(&[("a", P), ("b", P), ("c", N)]);
        let g = lex(&[("b", P), ("c", N), ("d", N)]);
        let s = split_datasets(&u, &g, &vocab(&["a", "b", "c", "d"]), 0.34, 1).unwrap();
        assert_eq!(s.set_a, vocab(&["a"]));
        assert_eq!(s.set_b, vocab(&["d"]));
        assert_eq!(s.set_c, vocab(&["b", "c"]));
        assert_eq!(s.test.len(), 1);
    }

    #[test]
    fn c_test_words_leave_both_train_sets_and_keep_gold_labels() {
        let u = lex(&[("x", P), ("y", P), ("z", N), ("only_u", P)]);
        let g = lex(&[("x", N), ("y", P), ("z", N), ("only_g", P)]);
        let v = vocab(&["x", "y", "z", "only_u", "only_g"]);
        for seed in 0..20 {
            let s = split_datasets(&u, &g, &v, 0.25, seed).unwrap();
            for w in s.test.keys() {
                assert!(!s.unisent_train.contains_key(w));
                assert!(!s.manual_train.contains_key(w));
            }
            if let Some(&label) = s.test.get("x") {
                assert_eq!(label, N);
            }
            if let Some(&label) = s.unisent_train.get("x") {
                assert_eq!(label, P);
            }
        }
    }

    #[test]
    fn empty_c_is_an_error() {
        let u = lex(&[("a", P)]);
        let g = lex(&[("b", P)]);
        assert!(split_datasets(&u, &g, &vocab(&["a", "b"]), 0.2, 0).is_err());
    }

    #[test]
    fn tiny_fraction_gives_empty_test_error() {
        let u = lex(&[("a", P), ("b", N)]);
        let g = lex(&[("a", P), ("b", N)]);
        assert!(split_datasets(&u, &g, &vocab(&["a", "b"]), 0.1, 0).is_err());
    }

    #[test]
    fn training_sets_are_size_matched() {
        let u_entries: Vec<(String, Polarity)> = (0..200)
            .map(|i| (format!("u{i}"), if i % 2 == 0 { P } else { N }))
            .collect();
        let g_entries: Vec<(String, Polarity)> = (0..50)
            .map(|i| (format!("g{i}"), if i % 3 == 0 { P } else { N }))
            .collect();
        let mut u = lex(&[("shared", P)]);
        let mut g = lex(&[("shared", P)]);
        for (w, p) in &u_entries {
            u.insert(w.clone(), *p, 1.0).unwrap();
        }
        for (w, p) in &g_entries {
            g.insert(w.clone(), *p, 1.0).unwrap();
        }
        let v: BTreeSet<String> = u.words().chain(g.words()).map(String::from).collect();
        let s = split_datasets(&u, &g, &v, 0.2, 3).unwrap();
        let (nu, nm) = (s.unisent_train.len(), s.manual_train.len());
        assert!((nu.abs_diff(nm)) as f64 <= SIZE_TOLERANCE * nu.max(nm) as f64);
    }

    proptest! {
        #[test]
        fn split_is_disjoint_and_deterministic(
            u_bits in proptest::collection::vec(0u8..4, 30),
            g_bits in proptest::collection::vec(0u8..4, 30),
            seed in 0u64..1000,
        ) {
            let mut u = lex(&[("anchor", P)]);
            let mut g = lex(&[("anchor", N)]);
            for (i, (&ub, &gb)) in u_bits.iter().zip(&g_bits).enumerate() {
                if ub > 0 { u.insert(format!("w{i}"), if ub % 2 == 0 { P } else { N }, 1.0).unwrap(); }
                if gb > 0 { g.insert(format!("w{i}"), if gb % 2 == 0 { P } else { N }, 1.0).unwrap(); }
            }
            let v: BTreeSet<String> = u.words().chain(g.words()).map(String::from).collect();
            if let Ok(s) = split_datasets(&u, &g, &v, 0.3, seed) {
                for w in s.test.keys() {
                    prop_assert!(!s.unisent_train.contains_key(w));
                    prop_assert!(!s.manual_train.contains_key(w));
                    prop_assert!(s.set_b.contains(w) || s.set_c.contains(w));
                }
                prop_assert_eq!(split_datasets(&u, &g, &v, 0.3, seed).unwrap(), s);
            }
        }
    }
}
