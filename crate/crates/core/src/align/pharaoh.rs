//! Pharaoh `i-j` alignment files: one line per verse pair, 0-based
//! source-target index pairs separated by spaces.

use std::fs;
use std::path::Path;

use super::AlignmentLink;
use crate::corpus::ParallelCorpus;
use crate::error::{Error, Result};

pub fn load_pharaoh_alignments(
    path: impl AsRef<Path>,
    corpus: &ParallelCorpus,
) -> Result<Vec<AlignmentLink>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_pharaoh(&text, path, corpus)
}

pub fn parse_pharaoh(
    text: &str,
    path: &Path,
    corpus: &ParallelCorpus,
) -> Result<Vec<AlignmentLink>> {
    let mut lines: Vec<&str> = text.split('\n').collect();
    if text.ends_with('\n') {
        lines.pop();
    }
    if text.is_empty() {
        lines.clear();
    }
    if lines.len() != corpus.len() {
        return Err(Error::AlignmentLineCount {
            expected: corpus.len(),
            found: lines.len(),
        });
    }
    let mut links = Vec::new();
    for (pair_index, (line, pair)) in lines.iter().zip(corpus.pairs()).enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        for item in line.split_whitespace() {
            let parsed = item
                .split_once('-')
                .and_then(|(i, j)| Some((i.parse::<usize>().ok()?, j.parse::<usize>().ok()?)));
            let (i, j) = parsed.ok_or_else(|| {
                Error::parse(path, pair_index + 1, format!("malformed link {item:?}"))
            })?;
            if i >= pair.source_tokens.len() || j >= pair.target_tokens.len() {
                return Err(Error::LinkOutOfRange {
                    pair: pair_index,
                    link: item.to_string(),
                    source_len: pair.source_tokens.len(),
                    target_len: pair.target_tokens.len(),
                });
            }
            links.push(AlignmentLink {
                pair_index,
                source_pos: Some(i),
                target_pos: j,
            });
        }
    }
    Ok(links)
}

/// Renders links as Pharaoh text with one line per pair. NULL links are not
/// representable and are omitted.
pub fn format_pharaoh(links: &[AlignmentLink], num_pairs: usize) -> String {
    let mut per_pair: Vec<Vec<String>> = vec![Vec::new(); num_pairs];
    for link in links {
        if let Some(i) = link.source_pos {
            per_pair[link.pair_index].push(format!("{i}-{}", link.target_pos));
        }
    }
    let mut out = String::new();
    for items in per_pair {
        out.push_str(&items.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_pharaoh(
    path: impl AsRef<Path>,
    links: &[AlignmentLink],
    num_pairs: usize,
) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_pharaoh(links, num_pairs)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::VersePair;
    use crate::tag::LangDomainTag;

    fn corpus(sizes: &[(usize, usize)]) -> ParallelCorpus {
        let pairs = sizes
            .iter()
            .enumerate()
            .map(|(k, &(s, t))| VersePair {
                verse_id: format!("v{k}"),
                source_tokens: (0..s).map(|i| format!("s{i}")).collect(),
                target_tokens: (0..t).map(|i| format!("t{i}")).collect(),
            })
            .collect();
        ParallelCorpus::from_pairs(
            LangDomainTag::new("eng", "bible").unwrap(),
            LangDomainTag::new("deu", "bible").unwrap(),
            pairs,
        )
        .unwrap()
    }

    fn link(pair_index: usize, i: usize, j: usize) -> AlignmentLink {
        AlignmentLink {
            pair_index,
            source_pos: Some(i),
            target_pos: j,
        }
    }

    #[test]
    fn parses_links() {
        let c = corpus(&[(2, 2)]);
        let links = parse_pharaoh("0-1 1-0\n", Path::new("a"), &c).unwrap();
        assert_eq!(links, vec![link(0, 0, 1), link(0, 1, 0)]);
    }

    #[test]
    fn out_of_range_names_pair_and_link() {
        let c = corpus(&[(2, 2)]);
        match parse_pharaoh("3-0\n", Path::new("a"), &c).unwrap_err() {
            Error::LinkOutOfRange { pair, link, .. } => {
                assert_eq!(pair, 0);
                assert_eq!(link, "3-0");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn blank_line_means_no_links() {
        let c = corpus(&[(2, 2), (1, 1), (1, 1)]);
        let links = parse_pharaoh("0-0\n\n0-0\n", Path::new("a"), &c).unwrap();
        assert_eq!(links, vec![link(0, 0, 0), link(2, 0, 0)]);
        let trailing_blank = parse_pharaoh("0-0\n0-0\n\n", Path::new("a"), &c).unwrap();
        assert_eq!(trailing_blank.len(), 2);
    }

    #[test]
    fn line_count_must_match() {
        let c = corpus(&[(1, 1), (1, 1)]);
        assert!(matches!(
            parse_pharaoh("0-0\n", Path::new("a"), &c),
            Err(Error::AlignmentLineCount {
                expected: 2,
                found: 1
            })
        ));
    }

    #[test]
    fn malformed_token_is_an_error() {
        let c = corpus(&[(1, 1)]);
        assert!(parse_pharaoh("0:0\n", Path::new("a"), &c).is_err());
    }

    #[test]
    fn format_round_trips() {
        let c = corpus(&[(2, 2), (1, 1), (3, 1)]);
        let links = vec![link(0, 1, 0), link(0, 0, 1), link(2, 2, 0)];
        let text = format_pharaoh(&links, c.len());
        assert_eq!(text, "1-0 0-1\n\n2-0\n");
        assert_eq!(parse_pharaoh(&text, Path::new("a"), &c).unwrap(), links);
    }
}
