//! Verse-aligned parallel corpora, tokenization and side vocabularies.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;

use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tag::LangDomainTag;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizationPolicy {
    pub lowercase: bool,
    pub strip_punctuation: bool,
    pub min_token_length: usize,
}

impl Default for TokenizationPolicy {
    fn default() -> Self {
        Self {
            lowercase: true,
            strip_punctuation: true,
            min_token_length: 1,
        }
    }
}

static EDGE_PUNCTUATION: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^\p{P}+|\p{P}+$").expect("valid punctuation pattern"));

/// Splits on whitespace and applies `policy` to every token. Punctuation is
/// only stripped at token edges, so `don't` and `well-known` survive intact.
pub fn tokenize(text: &str, policy: &TokenizationPolicy) -> Vec<String> {
    text.split_whitespace()
        .filter_map(|raw| {
            let token = if policy.strip_punctuation {
                EDGE_PUNCTUATION.replace_all(raw, "")
            } else {
                raw.into()
            };
            let token = if policy.lowercase {
                token.to_lowercase()
            } else {
                token.to_string()
            };
            (token.chars().count() >= policy.min_token_length.max(1)).then_some(token)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VersePair {
    pub verse_id: String,
    pub source_tokens: Vec<String>,
    pub target_tokens: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Source,
    Target,
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "source" => Ok(Side::Source),
            "target" => Ok(Side::Target),
            other => Err(Error::InvalidParameter(format!(
                "side must be source or target, got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelCorpus {
    source_tag: LangDomainTag,
    target_tag: LangDomainTag,
    pairs: Vec<VersePair>,
    /// Lines dropped because one side tokenized to nothing.
    dropped: usize,
}

impl ParallelCorpus {
    /// Builds a corpus from already tokenized pairs. Pairs with an empty side
    /// are dropped and counted, like the file loader does.
    pub fn from_pairs(
        source_tag: LangDomainTag,
        target_tag: LangDomainTag,
        pairs: Vec<VersePair>,
    ) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut kept = Vec::with_capacity(pairs.len());
        let mut dropped = 0;
        for (idx, pair) in pairs.into_iter().enumerate() {
            if !seen.insert(pair.verse_id.clone()) {
                return Err(Error::DuplicateVerse {
                    verse_id: pair.verse_id,
                    line: idx + 1,
                });
            }
            if pair.source_tokens.is_empty() || pair.target_tokens.is_empty() {
                dropped += 1;
            } else {
                kept.push(pair);
            }
        }
        if kept.is_empty() {
            return Err(Error::EmptyInput("parallel corpus".into()));
        }
        Ok(Self {
            source_tag,
            target_tag,
            pairs: kept,
            dropped,
        })
    }

    pub fn source_tag(&self) -> &LangDomainTag {
        &self.source_tag
    }

    pub fn target_tag(&self) -> &LangDomainTag {
        &self.target_tag
    }

    pub fn pairs(&self) -> &[VersePair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn dropped(&self) -> usize {
        self.dropped
    }

    pub fn tokens(&self, side: Side) -> impl Iterator<Item = &[String]> {
        self.pairs.iter().map(move |p| match side {
            Side::Source => p.source_tokens.as_slice(),
            Side::Target => p.target_tokens.as_slice(),
        })
    }
}

/// Loads a `verse_id<TAB>source_text<TAB>target_text` file.
pub fn load_parallel_corpus(
    path: impl AsRef<Path>,
    source_tag: LangDomainTag,
    target_tag: LangDomainTag,
    policy: &TokenizationPolicy,
) -> Result<ParallelCorpus> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_parallel_corpus(&text, path, source_tag, target_tag, policy)
}

pub(crate) fn parse_parallel_corpus(
    text: &str,
    path: &Path,
    source_tag: LangDomainTag,
    target_tag: LangDomainTag,
    policy: &TokenizationPolicy,
) -> Result<ParallelCorpus> {
    let mut seen = HashSet::new();
    let mut pairs = Vec::new();
    let mut dropped = 0;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(Error::parse(
                path,
                line_no,
                format!("expected 3 tab-separated columns, found {}", cols.len()),
            ));
        }
        let verse_id = cols[0].trim();
        if verse_id.is_empty() {
            return Err(Error::parse(path, line_no, "empty verse id"));
        }
        if !seen.insert(verse_id.to_string()) {
            return Err(Error::DuplicateVerse {
                verse_id: verse_id.to_string(),
                line: line_no,
            });
        }
        let source_tokens = tokenize(cols[1], policy);
        let target_tokens = tokenize(cols[2], policy);
        if source_tokens.is_empty() || target_tokens.is_empty() {
            dropped += 1;
            continue;
        }
        pairs.push(VersePair {
            verse_id: verse_id.to_string(),
            source_tokens,
            target_tokens,
        });
    }
    if pairs.is_empty() {
        return Err(Error::EmptyInput(format!(
            "parallel corpus {}",
            path.display()
        )));
    }
    Ok(ParallelCorpus {
        source_tag,
        target_tag,
        pairs,
        dropped,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    pub tag: LangDomainTag,
    pub entries: BTreeMap<String, u64>,
}

impl Vocabulary {
    pub fn count(&self, word: &str) -> u64 {
        self.entries.get(word).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.entries.values().sum()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn build_vocab(corpus: &ParallelCorpus, side: Side) -> Vocabulary {
    let mut entries = BTreeMap::new();
    for tokens in corpus.tokens(side) {
        for tok in tokens {
            *entries.entry(tok.clone()).or_insert(0u64) += 1;
        }
    }
    let tag = match side {
        Side::Source => corpus.source_tag.clone(),
        Side::Target => corpus.target_tag.clone(),
    };
    Vocabulary { tag, entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tags() -> (LangDomainTag, LangDomainTag) {
        (
            LangDomainTag::new("eng", "bible").unwrap(),
            LangDomainTag::new("spa", "bible").unwrap(),
        )
    }

    fn parse(text: &str) -> Result<ParallelCorpus> {
        let (s, t) = tags();
        parse_parallel_corpus(
            text,
            Path::new("mem.tsv"),
            s,
            t,
            &TokenizationPolicy::default(),
        )
    }

    fn pair(src: &[&str], tgt: &[&str]) -> VersePair {
        VersePair {
            verse_id: format!("{src:?}{tgt:?}"),
            source_tokens: src.iter().map(|s| s.to_string()).collect(),
            target_tokens: tgt.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn tokenize_strips_and_lowercases() {
        let p = TokenizationPolicy::default();
        assert_eq!(tokenize("Hello, world.", &p), vec!["hello", "world"]);
        assert_eq!(tokenize("don't stop", &p), vec!["don't", "stop"]);
        assert_eq!(
            tokenize("well-known «quote»", &p),
            vec!["well-known", "quote"]
        );
    }

    #[test]
    fn tokenize_length_filter() {
        let p = TokenizationPolicy {
            min_token_length: 2,
            ..Default::default()
        };
        assert!(tokenize("a B c", &p).is_empty());
    }

    #[test]
    fn tokenize_without_policy_flags_keeps_raw_tokens() {
        let p = TokenizationPolicy {
            lowercase: false,
            strip_punctuation: false,
            min_token_length: 1,
        };
        assert_eq!(tokenize("Hi, There!", &p), vec!["Hi,", "There!"]);
    }

    #[test]
    fn loads_simple_line() {
        let c = parse("MAT1:1\tthe book\tel libro\n").unwrap();
        assert_eq!(
            c.pairs()[0],
            VersePair {
                verse_id: "MAT1:1".into(),
                source_tokens: vec!["the".into(), "book".into()],
                target_tokens: vec!["el".into(), "libro".into()],
            }
        );
    }

    #[test]
    fn inverted_punctuation_is_stripped() {
        let c = parse("MAT1:2\tGod!\t¡Dios!\n").unwrap();
        assert_eq!(c.pairs()[0].source_tokens, vec!["god"]);
        assert_eq!(c.pairs()[0].target_tokens, vec!["dios"]);
    }

    #[test]
    fn duplicate_verse_is_rejected() {
        let err = parse("a\tx\ty\na\tp\tq\n").unwrap_err();
        assert!(
            matches!(err, Error::DuplicateVerse { line: 2, .. }),
            "{err}"
        );
    }

    #[test]
    fn wrong_column_count_names_line() {
        let err = parse("a\tx\ty\nb\tonly two\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn empty_file_is_rejected() {
        assert!(matches!(parse(""), Err(Error::EmptyInput(_))));
        assert!(matches!(parse("a\t...\tx\n"), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn empty_sides_are_dropped_and_counted() {
        let c = parse("a\t!!\tx\nb\tword\tother\nc\tw\t\n").unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.dropped(), 2);
    }

    #[test]
    fn vocab_counts_each_side() {
        let (s, t) = tags();
        let c = ParallelCorpus::from_pairs(
            s,
            t,
            vec![pair(&["a", "b"], &["x"]), pair(&["a"], &["x", "y"])],
        )
        .unwrap();
        let src = build_vocab(&c, Side::Source);
        assert_eq!(
            src.entries,
            BTreeMap::from([("a".into(), 2), ("b".into(), 1)])
        );
        let tgt = build_vocab(&c, Side::Target);
        assert_eq!(
            tgt.entries,
            BTreeMap::from([("x".into(), 2), ("y".into(), 1)])
        );
    }

    proptest! {
        #[test]
        fn tokenize_is_idempotent(s in "\\PC{0,60}") {
            let p = TokenizationPolicy::default();
            let once = tokenize(&s, &p);
            let twice = tokenize(&once.join(" "), &p);
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn vocab_conserves_tokens(lines in proptest::collection::vec(("[a-c ]{1,12}", "[x-z ]{1,12}"), 1..20)) {
            let text: String = lines
                .iter()
                .enumerate()
                .map(|(i, (s, t))| format!("v{i}\t{s}\t{t}\n"))
                .collect();
            if let Ok(c) = parse(&text) {
                for side in [Side::Source, Side::Target] {
                    let emitted: usize = c.tokens(side).map(|t| t.len()).sum();
                    prop_assert_eq!(build_vocab(&c, side).total(), emitted as u64);
                }
                prop_assert_eq!(parse(&text).unwrap(), c);
            }
        }
    }
}
