use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Lexical translation probabilities t(target | source), stored row-wise per
/// source word. Vocabularies are sorted so that rows and columns iterate in
/// lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct TranslationTable {
    pub(crate) source_vocab: Vec<String>,
    pub(crate) target_vocab: Vec<String>,
    pub(crate) source_index: HashMap<String, u32>,
    pub(crate) target_index: HashMap<String, u32>,
    /// `row_offsets[s]..row_offsets[s + 1]` indexes `columns`/`probs` for source `s`.
    pub(crate) row_offsets: Vec<usize>,
    pub(crate) columns: Vec<u32>,
    pub(crate) probs: Vec<f64>,
}

impl TranslationTable {
    /// Builds a table from sorted vocabularies and per-source sorted column
    /// lists; probabilities start at `init`.
    pub(crate) fn with_structure(
        source_vocab: Vec<String>,
        target_vocab: Vec<String>,
        rows: Vec<Vec<u32>>,
        init: f64,
    ) -> Self {
        let mut row_offsets = Vec::with_capacity(rows.len() + 1);
        let mut columns = Vec::new();
        row_offsets.push(0);
        for row in rows {
            columns.extend(row);
            row_offsets.push(columns.len());
        }
        let probs = vec![init; columns.len()];
        let source_index = index_of(&source_vocab);
        let target_index = index_of(&target_vocab);
        Self {
            source_vocab,
            target_vocab,
            source_index,
            target_index,
            row_offsets,
            columns,
            probs,
        }
    }

    pub(crate) fn entry_index(&self, source: u32, target: u32) -> Option<usize> {
        let start = self.row_offsets[source as usize];
        let end = self.row_offsets[source as usize + 1];
        self.columns[start..end]
            .binary_search(&target)
            .ok()
            .map(|k| start + k)
    }

    pub(crate) fn source_id(&self, word: &str) -> Option<u32> {
        self.source_index.get(word).copied()
    }

    pub(crate) fn target_id(&self, word: &str) -> Option<u32> {
        self.target_index.get(word).copied()
    }

    pub(crate) fn prob_by_id(&self, source: Option<u32>, target: Option<u32>) -> Option<f64> {
        let idx = self.entry_index(source?, target?)?;
        Some(self.probs[idx])
    }

    /// t(target | source), if the pair is in the table.
    pub fn prob(&self, source: &str, target: &str) -> Option<f64> {
        self.prob_by_id(self.source_id(source), self.target_id(target))
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn source_words(&self) -> impl Iterator<Item = &str> {
        self.source_vocab.iter().map(String::as_str)
    }

    /// Entries of one source row in target order.
    pub fn row(&self, source: &str) -> impl Iterator<Item = (&str, f64)> {
        let range = match self.source_id(source) {
            Some(s) => self.row_offsets[s as usize]..self.row_offsets[s as usize + 1],
            None => 0..0,
        };
        range.map(move |k| {
            (
                self.target_vocab[self.columns[k] as usize].as_str(),
                self.probs[k],
            )
        })
    }

    /// All entries sorted by (source, target).
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, f64)> {
        (0..self.source_vocab.len()).flat_map(move |s| {
            (self.row_offsets[s]..self.row_offsets[s + 1]).map(move |k| {
                (
                    self.source_vocab[s].as_str(),
                    self.target_vocab[self.columns[k] as usize].as_str(),
                    self.probs[k],
                )
            })
        })
    }

    /// Largest deviation of a row sum from 1 across all source words.
    pub fn max_normalization_error(&self) -> f64 {
        (0..self.source_vocab.len())
            .map(|s| {
                let sum: f64 = self.probs[self.row_offsets[s]..self.row_offsets[s + 1]]
                    .iter()
                    .sum();
                (sum - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// The most probable target for `source`; ties go to the lexicographically
    /// smaller target.
    pub fn best_target(&self, source: &str) -> Option<(&str, f64)> {
        self.row(source)
            .fold(None, |best: Option<(&str, f64)>, (t, p)| match best {
                Some((_, bp)) if bp >= p => best,
                _ => Some((t, p)),
            })
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (s, t, p) in self.iter() {
            out.push_str(&format!("{s}\t{t}\t{p}\n"));
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
        let mut triples = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 {
                return Err(Error::parse(
                    path,
                    idx + 1,
                    "expected source<TAB>target<TAB>prob",
                ));
            }
            let p: f64 = cols[2].parse().map_err(|_| {
                Error::parse(path, idx + 1, format!("bad probability {:?}", cols[2]))
            })?;
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::parse(
                    path,
                    idx + 1,
                    format!("probability {p} outside (0, 1]"),
                ));
            }
            triples.push((cols[0].to_string(), cols[1].to_string(), p));
        }
        if triples.is_empty() {
            return Err(Error::EmptyInput(format!(
                "translation table {}",
                path.display()
            )));
        }
        Ok(Self::from_triples(triples))
    }

    /// Builds a table from explicit (source, target, prob) entries. Later
    /// duplicates overwrite earlier ones. No normalization is applied.
    pub fn from_triples(triples: Vec<(String, String, f64)>) -> Self {
        let mut source_vocab: Vec<String> = triples.iter().map(|t| t.0.clone()).collect();
        source_vocab.sort();
        source_vocab.dedup();
        let mut target_vocab: Vec<String> = triples.iter().map(|t| t.1.clone()).collect();
        target_vocab.sort();
        target_vocab.dedup();
        let s_index = index_of(&source_vocab);
        let t_index = index_of(&target_vocab);

        let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); source_vocab.len()];
        for (s, t, p) in triples {
            let row = &mut rows[s_index[&s] as usize];
            let col = t_index[&t];
            match row.iter_mut().find(|(c, _)| *c == col) {
                Some(slot) => slot.1 = p,
                None => row.push((col, p)),
            }
        }
        let mut columns_rows = Vec::with_capacity(rows.len());
        let mut probs = Vec::new();
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            probs.extend(row.iter().map(|&(_, p)| p));
            columns_rows.push(row.into_iter().map(|(c, _)| c).collect());
        }
        let mut table = Self::with_structure(source_vocab, target_vocab, columns_rows, 0.0);
        table.probs = probs;
        table
    }
}

fn index_of(vocab: &[String]) -> HashMap<String, u32> {
    vocab
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), i as u32))
        .collect()
}
