//! Synthetic planted-lexicon worlds shared by the integration tests.

#![allow(dead_code)]

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use lexidrift::pipeline::RunConfig;
use lexidrift::Polarity;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub struct WorldSpec {
    pub pairs: usize,
    /// Planted sentiment words, half of each polarity.
    pub planted: usize,
    pub neutral: usize,
    /// Sentiment words known only to the gold lexicon.
    pub gold_only: usize,
    pub dim: usize,
    /// Distance of each sentiment cluster center from the origin.
    pub separation: f64,
    pub seed: u64,
}

impl Default for WorldSpec {
    fn default() -> Self {
        Self {
            pairs: 500,
            planted: 40,
            neutral: 150,
            gold_only: 60,
            dim: 16,
            separation: 4.0,
            seed: 7,
        }
    }
}

pub struct World {
    pub corpus: String,
    pub seeds: String,
    pub source_embedding: String,
    pub target_embedding: String,
    pub twitter_embedding: String,
    pub gold: String,
    pub emoticons: String,
    /// Planted target words with their true polarity.
    pub planted: Vec<(String, Polarity)>,
}

pub fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn normal_vec(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| gauss(rng)).collect()
}

fn write_vectors(out: &mut String, word: &str, v: &[f64]) {
    out.push_str(word);
    for x in v {
        write!(out, " {x:.6}").unwrap();
    }
    out.push('\n');
}

fn polarity_of(i: usize, n: usize) -> Polarity {
    if i < n / 2 {
        Polarity::Positive
    } else {
        Polarity::Negative
    }
}

impl World {
    pub fn generate(spec: &WorldSpec) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let planted: Vec<(String, String, Polarity)> = (0..spec.planted)
            .map(|i| {
                let p = polarity_of(i, spec.planted);
                let tag = if p == Polarity::Positive {
                    "pos"
                } else {
                    "neg"
                };
                (format!("s{tag}{i}"), format!("t{tag}{i}"), p)
            })
            .collect();
        let neutral: Vec<(String, String)> = (0..spec.neutral)
            .map(|i| (format!("sn{i}"), format!("tn{i}")))
            .collect();

        let mut corpus = String::new();
        for v in 0..spec.pairs {
            let mut words: Vec<(&str, &str)> = Vec::new();
            for _ in 0..rng.gen_range(1..=2) {
                let (s, t, _) = planted.choose(&mut rng).unwrap();
                words.push((s, t));
            }
            for _ in 0..rng.gen_range(4..=8) {
                let (s, t) = neutral.choose(&mut rng).unwrap();
                words.push((s, t));
            }
            words.shuffle(&mut rng);
            let source: Vec<&str> = words.iter().map(|w| w.0).collect();
            let mut target: Vec<&str> = words.iter().map(|w| w.1).collect();
            for j in 1..target.len() {
                if rng.gen_bool(0.2) {
                    target.swap(j - 1, j);
                }
            }
            if rng.gen_bool(0.5) {
                let at = rng.gen_range(0..=target.len());
                target.insert(at, "la");
            }
            writeln!(corpus, "v{v}\t{}\t{}", source.join(" "), target.join(" ")).unwrap();
        }

        let mut seeds = String::new();
        let mut sorted_seeds: Vec<_> = planted.iter().map(|(s, _, p)| (s.clone(), *p)).collect();
        sorted_seeds.sort();
        for (s, p) in &sorted_seeds {
            writeln!(seeds, "{s}\t{p}").unwrap();
        }

        let center = {
            let v = normal_vec(&mut rng, spec.dim);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter()
                .map(|x| x / norm * spec.separation)
                .collect::<Vec<_>>()
        };
        let place = |rng: &mut ChaCha8Rng, p: Option<Polarity>| -> Vec<f64> {
            let sign = match p {
                Some(Polarity::Positive) => 1.0,
                Some(Polarity::Negative) => -1.0,
                None => 0.0,
            };
            normal_vec(rng, spec.dim)
                .into_iter()
                .zip(&center)
                .map(|(n, c)| n + sign * c)
                .collect()
        };

        let gold_only: Vec<(String, Polarity)> = (0..spec.gold_only)
            .map(|i| {
                let p = polarity_of(i, spec.gold_only);
                let tag = if p == Polarity::Positive {
                    "pos"
                } else {
                    "neg"
                };
                (format!("g{tag}{i}"), p)
            })
            .collect();

        let mut vocab: Vec<(String, Vec<f64>)> = Vec::new();
        for (_, t, p) in &planted {
            vocab.push((t.clone(), place(&mut rng, Some(*p))));
        }
        for (w, p) in &gold_only {
            vocab.push((w.clone(), place(&mut rng, Some(*p))));
        }
        for (_, t) in &neutral {
            vocab.push((t.clone(), place(&mut rng, None)));
        }
        vocab.push(("la".into(), place(&mut rng, None)));

        let emoticon_list: Vec<(&str, Polarity)> = vec![
            (":)", Polarity::Positive),
            (":-)", Polarity::Positive),
            (":D", Polarity::Positive),
            (";)", Polarity::Positive),
            ("<3", Polarity::Positive),
            (":(", Polarity::Negative),
            (":-(", Polarity::Negative),
            (":'(", Polarity::Negative),
            (">:(", Polarity::Negative),
            (":/", Polarity::Negative),
        ];

        let mut source_embedding = format!("{} {}\n", vocab.len(), spec.dim);
        let mut target_embedding = source_embedding.clone();
        let mut twitter_embedding = format!("{} {}\n", vocab.len() + emoticon_list.len(), spec.dim);
        for (w, v) in &vocab {
            let drifted: Vec<f64> = v.iter().map(|x| x + 0.1 * gauss(&mut rng)).collect();
            write_vectors(&mut source_embedding, w, &drifted);
            write_vectors(&mut target_embedding, w, v);
            write_vectors(&mut twitter_embedding, w, v);
        }
        for (e, p) in &emoticon_list {
            let v = place(&mut rng, Some(*p));
            write_vectors(&mut twitter_embedding, e, &v);
        }

        let mut gold_words: Vec<(String, Polarity)> = planted
            .iter()
            .map(|(_, t, p)| (t.clone(), *p))
            .chain(gold_only.iter().cloned())
            .collect();
        gold_words.sort();
        let mut gold = String::new();
        for (w, p) in &gold_words {
            writeln!(gold, "{w}\t{p}").unwrap();
        }
        let mut emoticons = String::new();
        for (e, p) in &emoticon_list {
            writeln!(emoticons, "{e}\t{p}").unwrap();
        }

        Self {
            corpus,
            seeds,
            source_embedding,
            target_embedding,
            twitter_embedding,
            gold,
            emoticons,
            planted: planted.into_iter().map(|(_, t, p)| (t, p)).collect(),
        }
    }

    /// Writes the input files into `dir` and returns a run configuration
    /// reading them, with outputs under `dir/out`.
    pub fn write(&self, dir: &Path) -> RunConfig {
        let files = [
            ("corpus.tsv", &self.corpus),
            ("seeds.tsv", &self.seeds),
            ("bible.vec", &self.source_embedding),
            ("wiki.vec", &self.target_embedding),
            ("twitter.vec", &self.twitter_embedding),
            ("gold.tsv", &self.gold),
            ("emoticons.tsv", &self.emoticons),
        ];
        for (name, text) in files {
            fs::write(dir.join(name), text).unwrap();
        }
        RunConfig {
            corpus: dir.join("corpus.tsv"),
            seeds: dir.join("seeds.tsv"),
            source_embedding: dir.join("bible.vec"),
            target_embedding: dir.join("wiki.vec"),
            gold: dir.join("gold.tsv"),
            emoticons: Some(dir.join("emoticons.tsv")),
            emoticon_embedding: Some(dir.join("twitter.vec")),
            output_dir: dir.join("out"),
            target_language: "xx".into(),
            ..RunConfig::default()
        }
    }
}
