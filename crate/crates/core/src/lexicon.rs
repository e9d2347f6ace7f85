//! Seed lexicons: word to polarity, with an optional confidence weight.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tag::LangDomainTag;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Polarity {
    #[serde(rename = "POS")]
    Positive,
    #[serde(rename = "NEG")]
    Negative,
}

impl Polarity {
    pub const BOTH: [Polarity; 2] = [Polarity::Positive, Polarity::Negative];

    pub fn opposite(self) -> Self {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Positive => "POS",
            Polarity::Negative => "NEG",
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Polarity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "POS" | "POSITIVE" => Ok(Polarity::Positive),
            "NEG" | "NEGATIVE" => Ok(Polarity::Negative),
            _ => Err(Error::InvalidParameter(format!("unknown polarity {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedEntry {
    pub polarity: Polarity,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedLexicon {
    pub tag: LangDomainTag,
    entries: BTreeMap<String, SeedEntry>,
}

impl SeedLexicon {
    pub fn new(tag: LangDomainTag) -> Self {
        Self {
            tag,
            entries: BTreeMap::new(),
        }
    }

    /// Inserts or replaces a word. Weight must be finite and positive.
    pub fn insert(
        &mut self,
        word: impl Into<String>,
        polarity: Polarity,
        weight: f64,
    ) -> Result<()> {
        if !(weight.is_finite() && weight > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lexicon weight {weight} must be finite and > 0"
            )));
        }
        self.entries
            .insert(word.into(), SeedEntry { polarity, weight });
        Ok(())
    }

    pub fn get(&self, word: &str) -> Option<&SeedEntry> {
        self.entries.get(word)
    }

    pub fn polarity(&self, word: &str) -> Option<Polarity> {
        self.entries.get(word).map(|e| e.polarity)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(word)
    }

    /// Entries in lexicographic word order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &SeedEntry)> {
        self.entries.iter().map(|(w, e)| (w.as_str(), e))
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn load(path: impl AsRef<Path>, tag: LangDomainTag) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path, tag)
    }

    pub(crate) fn parse(text: &str, path: &Path, tag: LangDomainTag) -> Result<Self> {
        let mut lex = SeedLexicon::new(tag);
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.strip_suffix('\r').unwrap_or(line);
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if !(2..=3).contains(&cols.len()) {
                return Err(Error::parse(
                    path,
                    line_no,
                    "expected word<TAB>POS|NEG[<TAB>weight]",
                ));
            }
            let word = cols[0].trim();
            if word.is_empty() {
                return Err(Error::parse(path, line_no, "empty word"));
            }
            let polarity: Polarity = cols[1]
                .trim()
                .parse()
                .map_err(|e: Error| Error::parse(path, line_no, e.to_string()))?;
            let weight = match cols.get(2) {
                Some(w) => w
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| Error::parse(path, line_no, format!("bad weight {w:?}")))?,
                None => 1.0,
            };
            if lex.contains(word) {
                return Err(Error::parse(
                    path,
                    line_no,
                    format!("duplicate word {word:?}"),
                ));
            }
            lex.insert(word, polarity, weight)
                .map_err(|e| Error::parse(path, line_no, e.to_string()))?;
        }
        Ok(lex)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (word, entry) in &self.entries {
            out.push_str(&format!("{word}\t{}\t{}\n", entry.polarity, entry.weight));
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(self.to_tsv().as_bytes())
            .map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tag() -> LangDomainTag {
        LangDomainTag::new("eng", "general").unwrap()
    }

    #[test]
    fn weight_column_is_optional() {
        let lex = SeedLexicon::parse("good\tPOS\nbad\tNEG\t0.5\n", Path::new("x"), tag()).unwrap();
        assert_eq!(lex.get("good").unwrap().weight, 1.0);
        assert_eq!(lex.get("bad").unwrap().weight, 0.5);
        assert_eq!(lex.to_tsv(), "bad\tNEG\t0.5\ngood\tPOS\t1\n");
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(SeedLexicon::parse("good\tMAYBE\n", Path::new("x"), tag()).is_err());
        assert!(SeedLexicon::parse("good\tPOS\t0\n", Path::new("x"), tag()).is_err());
        assert!(SeedLexicon::parse("good\tPOS\ngood\tNEG\n", Path::new("x"), tag()).is_err());
        assert!(SeedLexicon::parse("good\n", Path::new("x"), tag()).is_err());
    }

    #[test]
    fn round_trips_through_tsv() {
        let mut lex = SeedLexicon::new(tag());
        lex.insert("zeal", Polarity::Positive, 1.0).unwrap();
        lex.insert("awful", Polarity::Negative, 2.25).unwrap();
        let back = SeedLexicon::parse(&lex.to_tsv(), Path::new("x"), tag()).unwrap();
        assert_eq!(back, lex);
    }
}
