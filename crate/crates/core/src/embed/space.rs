use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::tag::LangDomainTag;

/// Word vectors for one (language, domain) pair. Vectors are stored densely in
/// file order together with their Euclidean norms.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSpace {
    tag: LangDomainTag,
    dim: usize,
    words: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<f64>,
    norms: Vec<f64>,
    duplicates: usize,
    zero_vectors: usize,
}

impl EmbeddingSpace {
    fn empty(tag: LangDomainTag, dim: usize) -> Self {
        Self {
            tag,
            dim,
            words: Vec::new(),
            index: HashMap::new(),
            data: Vec::new(),
            norms: Vec::new(),
            duplicates: 0,
            zero_vectors: 0,
        }
    }

    /// Adds a vector; duplicates and zero vectors are skipped and counted.
    fn push(&mut self, word: &str, vector: &[f64]) {
        if self.index.contains_key(word) {
            self.duplicates += 1;
            return;
        }
        let norm = vector.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            self.zero_vectors += 1;
            return;
        }
        self.index.insert(word.to_string(), self.words.len());
        self.words.push(word.to_string());
        self.data.extend_from_slice(vector);
        self.norms.push(norm);
    }

    /// Builds a space from in-memory vectors with the same duplicate and
    /// zero-vector rules as the file loader.
    pub fn from_vectors<S: AsRef<str>>(
        tag: LangDomainTag,
        vectors: &[(S, Vec<f64>)],
    ) -> Result<Self> {
        let dim = vectors
            .first()
            .map(|(_, v)| v.len())
            .ok_or_else(|| Error::EmptyInput("embedding space".into()))?;
        if dim == 0 {
            return Err(Error::InvalidParameter(
                "embedding dimension must be >= 1".into(),
            ));
        }
        let mut space = Self::empty(tag, dim);
        for (word, v) in vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "non-finite component in vector for {:?}",
                    word.as_ref()
                )));
            }
            space.push(word.as_ref(), v);
        }
        if space.words.is_empty() {
            return Err(Error::EmptyInput("embedding space".into()));
        }
        Ok(space)
    }

    pub fn tag(&self) -> &LangDomainTag {
        &self.tag
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Words in file order.
    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn position(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn vector(&self, word: &str) -> Option<&[f64]> {
        self.position(word).map(|i| self.vector_at(i))
    }

    pub(crate) fn vector_at(&self, idx: usize) -> &[f64] {
        &self.data[idx * self.dim..(idx + 1) * self.dim]
    }

    /// Duplicate word lines skipped while loading.
    pub fn duplicates(&self) -> usize {
        self.duplicates
    }

    /// Zero vectors rejected while loading.
    pub fn zero_vectors(&self) -> usize {
        self.zero_vectors
    }

    /// Cosine similarity between two stored words, clamped to [-1, 1].
    pub(crate) fn cosine_at(&self, i: usize, j: usize) -> f64 {
        let dot: f64 = self
            .vector_at(i)
            .iter()
            .zip(self.vector_at(j))
            .map(|(a, b)| a * b)
            .sum();
        (dot / (self.norms[i] * self.norms[j])).clamp(-1.0, 1.0)
    }

    pub fn cosine(&self, a: &str, b: &str) -> Result<f64> {
        let i = self
            .position(a)
            .ok_or_else(|| Error::UnknownWord(a.to_string()))?;
        let j = self
            .position(b)
            .ok_or_else(|| Error::UnknownWord(b.to_string()))?;
        Ok(self.cosine_at(i, j))
    }

    /// Reads word2vec-style text: an optional `count dim` header, then one
    /// `word v1 ... v_dim` line per word.
    pub fn load(path: impl AsRef<Path>, tag: LangDomainTag) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path, tag)
    }

    pub(crate) fn parse(text: &str, path: &Path, tag: LangDomainTag) -> Result<Self> {
        let mut space: Option<Self> = None;
        let mut header: Option<(usize, usize)> = None;
        let mut values = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let mut fields = line.split_whitespace();
            let Some(word) = fields.next() else { continue };
            let rest: Vec<&str> = fields.collect();
            if idx == 0 && rest.len() == 1 {
                if let (Ok(count), Ok(dim)) = (word.parse::<usize>(), rest[0].parse::<usize>()) {
                    if dim == 0 {
                        return Err(Error::parse(path, line_no, "header declares dimension 0"));
                    }
                    header = Some((count, dim));
                    continue;
                }
            }
            values.clear();
            for field in &rest {
                let v: f64 = field.parse().map_err(|_| {
                    Error::parse(path, line_no, format!("non-numeric component {field:?}"))
                })?;
                if !v.is_finite() {
                    return Err(Error::parse(
                        path,
                        line_no,
                        format!("non-finite component {field:?}"),
                    ));
                }
                values.push(v);
            }
            let space = space.get_or_insert_with(|| {
                let dim = header.map_or(values.len(), |(_, d)| d);
                Self::empty(tag.clone(), dim)
            });
            if values.len() != space.dim || values.is_empty() {
                return Err(Error::parse(
                    path,
                    line_no,
                    format!(
                        "dimension mismatch: expected {}, found {}",
                        space.dim,
                        values.len()
                    ),
                ));
            }
            space.push(word, &values);
        }
        let space = space
            .filter(|s| !s.words.is_empty())
            .ok_or_else(|| Error::EmptyInput(format!("embedding file {}", path.display())))?;
        if space.duplicates > 0 {
            log::warn!(
                "{}: skipped {} duplicate words",
                path.display(),
                space.duplicates
            );
        }
        if space.zero_vectors > 0 {
            log::warn!(
                "{}: rejected {} zero vectors",
                path.display(),
                space.zero_vectors
            );
        }
        if let Some((count, _)) = header {
            let seen = space.words.len() + space.duplicates + space.zero_vectors;
            if count != seen {
                log::warn!(
                    "{}: header announces {count} words, found {seen}",
                    path.display()
                );
            }
        }
        Ok(space)
    }

    /// Writes the space in the text format read by [`EmbeddingSpace::load`].
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.words.len(), self.dim);
        for (i, w) in self.words.iter().enumerate() {
            out.push_str(w);
            for v in self.vector_at(i) {
                out.push(' ');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }
}
