//! Annotation projection: alignment links whose source word carries a seed
//! label become labeled target-word events, and target words strongly
//! associated with a label (two-sided chi-squared, Benjamini-Hochberg FDR)
//! form the induced lexicon.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::align::AlignmentLink;
use crate::corpus::ParallelCorpus;
use crate::error::{Error, Result};
use crate::lexicon::{Polarity, SeedLexicon};
use crate::tag::LangDomainTag;

/// 2x2 contingency counts for one (target word, polarity) hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cells {
    /// word present, label present
    pub a: u64,
    /// word present, label absent
    pub b: u64,
    /// word absent, label present
    pub c: u64,
    /// word absent, label absent
    pub d: u64,
}

impl Cells {
    pub fn total(&self) -> u64 {
        self.a + self.b + self.c + self.d
    }

    /// +1 when `a` exceeds its expectation under independence, else -1.
    pub fn direction(&self) -> i8 {
        let n = self.total() as u128;
        let observed = self.a as u128 * n;
        let expected = (self.a + self.b) as u128 * (self.a + self.c) as u128;
        if observed > expected {
            1
        } else {
            -1
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssociationTable {
    rows: BTreeMap<(String, Polarity), Cells>,
    total: u64,
}

impl AssociationTable {
    /// Builds the table from labeled (target word, polarity) events.
    pub fn from_events<'a>(events: impl IntoIterator<Item = (&'a str, Polarity)>) -> Result<Self> {
        let mut joint: BTreeMap<(String, Polarity), u64> = BTreeMap::new();
        let mut per_word: BTreeMap<&str, u64> = BTreeMap::new();
        let mut per_label: HashMap<Polarity, u64> = HashMap::new();
        let mut total = 0u64;
        for (word, pol) in events {
            *joint.entry((word.to_string(), pol)).or_default() += 1;
            *per_word.entry(word).or_default() += 1;
            *per_label.entry(pol).or_default() += 1;
            total += 1;
        }
        if total == 0 {
            return Err(Error::NoSeedCoverage);
        }
        let mut rows = BTreeMap::new();
        for (word, n_w) in per_word {
            for pol in Polarity::BOTH {
                let a = joint.get(&(word.to_string(), pol)).copied().unwrap_or(0);
                let n_p = per_label.get(&pol).copied().unwrap_or(0);
                let cells = Cells {
                    a,
                    b: n_w - a,
                    c: n_p - a,
                    d: total + a - n_w - n_p,
                };
                rows.insert((word.to_string(), pol), cells);
            }
        }
        Ok(Self { rows, total })
    }

    pub fn get(&self, word: &str, polarity: Polarity) -> Option<Cells> {
        self.rows.get(&(word.to_string(), polarity)).copied()
    }

    /// Number of labeled link events; equals `a+b+c+d` of every row.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Polarity, Cells)> {
        self.rows.iter().map(|((w, p), c)| (w.as_str(), *p, *c))
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Replaces the source word of each link by its seed label and counts the
/// resulting (target word, label) events. NULL links and links from
/// unlabeled source words contribute nothing.
pub fn substitute_and_count(
    links: &[AlignmentLink],
    corpus: &ParallelCorpus,
    seeds: &SeedLexicon,
) -> Result<AssociationTable> {
    let pairs = corpus.pairs();
    let events = links.iter().filter_map(|link| {
        let pair = pairs.get(link.pair_index)?;
        let source = pair.source_tokens.get(link.source_pos?)?;
        let polarity = seeds.polarity(source)?;
        let target = pair.target_tokens.get(link.target_pos)?;
        Some((target.as_str(), polarity))
    });
    AssociationTable::from_events(events)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Chi2 {
    pub statistic: f64,
    pub p_value: f64,
}

/// Survival function of the chi-squared distribution with one degree of freedom.
pub fn chi2_sf_1dof(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    erfc((x / 2.0).sqrt())
}

/// Pearson chi-squared test of independence on a 2x2 table (no continuity
/// correction). Any zero margin yields statistic 0 and p 1.
pub fn chi2_two_sided(a: i64, b: i64, c: i64, d: i64) -> Result<Chi2> {
    if a < 0 || b < 0 || c < 0 || d < 0 {
        return Err(Error::NegativeCount);
    }
    let n = a + b + c + d;
    if n < 1 {
        return Err(Error::InvalidParameter("contingency table is empty".into()));
    }
    let margins = [a + b, c + d, a + c, b + d];
    if margins.contains(&0) {
        return Ok(Chi2 {
            statistic: 0.0,
            p_value: 1.0,
        });
    }
    let diff = (a as i128 * d as i128 - b as i128 * c as i128) as f64;
    let denom = margins.iter().map(|&m| m as f64).product::<f64>();
    let statistic = n as f64 * diff * diff / denom;
    Ok(Chi2 {
        statistic,
        p_value: chi2_sf_1dof(statistic),
    })
}

/// Benjamini-Hochberg step-up procedure at level `q`. Returns one
/// significance flag per input p-value, in input order.
pub fn benjamini_hochberg(p_values: &[f64], q: f64) -> Vec<bool> {
    let m = p_values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| p_values[i].total_cmp(&p_values[j]).then(i.cmp(&j)));
    let cutoff = order
        .iter()
        .enumerate()
        .rev()
        .find(|&(rank, &idx)| p_values[idx] <= (rank + 1) as f64 * q / m as f64)
        .map(|(rank, _)| rank + 1)
        .unwrap_or(0);
    let mut flags = vec![false; m];
    for &idx in &order[..cutoff] {
        flags[idx] = true;
    }
    flags
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedCandidate {
    pub word: String,
    pub polarity: Polarity,
    pub chi2_stat: f64,
    pub p_value: f64,
    pub direction: i8,
    pub significant: bool,
}

/// Tests every row of the table and applies BH jointly across all rows.
pub fn score_candidates(table: &AssociationTable, q: f64) -> Result<Vec<SeedCandidate>> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "FDR level q must be in (0, 1), got {q}"
        )));
    }
    let mut candidates = table
        .iter()
        .map(|(word, polarity, cells)| {
            let chi2 = chi2_two_sided(
                cells.a as i64,
                cells.b as i64,
                cells.c as i64,
                cells.d as i64,
            )?;
            Ok(SeedCandidate {
                word: word.to_string(),
                polarity,
                chi2_stat: chi2.statistic,
                p_value: chi2.p_value,
                direction: cells.direction(),
                significant: false,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let p: Vec<f64> = candidates.iter().map(|c| c.p_value).collect();
    for (cand, flag) in candidates.iter_mut().zip(benjamini_hochberg(&p, q)) {
        cand.significant = flag;
    }
    Ok(candidates)
}

/// Keeps significant, positively associated candidates. A word kept for both
/// polarities goes to the one with the larger statistic; exact ties drop it.
pub fn resolve_candidates(candidates: &[SeedCandidate], tag: LangDomainTag) -> SeedLexicon {
    let mut best: BTreeMap<&str, Option<(Polarity, f64)>> = BTreeMap::new();
    for cand in candidates
        .iter()
        .filter(|c| c.significant && c.direction > 0)
    {
        match best.get_mut(cand.word.as_str()) {
            None => {
                best.insert(&cand.word, Some((cand.polarity, cand.chi2_stat)));
            }
            Some(slot) => {
                *slot = match *slot {
                    Some((_, stat)) if stat == cand.chi2_stat => None,
                    Some((_, stat)) if stat > cand.chi2_stat => *slot,
                    Some(_) => Some((cand.polarity, cand.chi2_stat)),
                    None => None,
                };
            }
        }
    }
    let mut lexicon = SeedLexicon::new(tag);
    for (word, choice) in best {
        if let Some((polarity, _)) = choice {
            lexicon
                .insert(word, polarity, 1.0)
                .expect("unit weight is valid");
        }
    }
    lexicon
}

pub fn extract_lexicon(
    table: &AssociationTable,
    q: f64,
    tag: LangDomainTag,
) -> Result<SeedLexicon> {
    Ok(resolve_candidates(&score_candidates(table, q)?, tag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::VersePair;
    use approx::assert_relative_eq;

    fn tag() -> LangDomainTag {
        LangDomainTag::new("spa", "bible").unwrap()
    }

    #[test]
    fn link_substitution_produces_event() {
        let corpus = ParallelCorpus::from_pairs(
            LangDomainTag::new("eng", "bible").unwrap(),
            tag(),
            vec![VersePair {
                verse_id: "v".into(),
                source_tokens: vec!["good".into(), "the".into()],
                target_tokens: vec!["bueno".into(), "el".into()],
            }],
        )
        .unwrap();
        let mut seeds = SeedLexicon::new(LangDomainTag::new("eng", "general").unwrap());
        seeds.insert("good", Polarity::Positive, 1.0).unwrap();
        let links = vec![
            AlignmentLink {
                pair_index: 0,
                source_pos: Some(0),
                target_pos: 0,
            },
            AlignmentLink {
                pair_index: 0,
                source_pos: Some(1),
                target_pos: 1,
            },
            AlignmentLink {
                pair_index: 0,
                source_pos: None,
                target_pos: 1,
            },
        ];
        let table = substitute_and_count(&links, &corpus, &seeds).unwrap();
        assert_eq!(table.total(), 1);
        assert_eq!(table.get("bueno", Polarity::Positive).unwrap().a, 1);
        assert!(table.get("el", Polarity::Positive).is_none());

        let only_unlabeled = &links[1..];
        assert!(matches!(
            substitute_and_count(only_unlabeled, &corpus, &seeds),
            Err(Error::NoSeedCoverage)
        ));
    }

    #[test]
    fn cells_follow_presence_definitions() {
        let events = [
            ("x", Polarity::Positive),
            ("x", Polarity::Positive),
            ("x", Polarity::Positive),
            ("y", Polarity::Negative),
        ];
        let table = AssociationTable::from_events(events).unwrap();
        assert_eq!(
            table.get("x", Polarity::Positive).unwrap(),
            Cells {
                a: 3,
                b: 0,
                c: 0,
                d: 1
            }
        );
        assert_eq!(
            table.get("y", Polarity::Positive).unwrap(),
            Cells {
                a: 0,
                b: 1,
                c: 3,
                d: 0
            }
        );
        assert!(table.iter().all(|(_, _, c)| c.total() == 4));
    }

    #[test]
    fn chi2_independence_and_degenerate_cases() {
        assert_eq!(
            chi2_two_sided(10, 10, 10, 10).unwrap(),
            Chi2 {
                statistic: 0.0,
                p_value: 1.0
            }
        );
        assert_eq!(
            chi2_two_sided(5, 0, 0, 0).unwrap(),
            Chi2 {
                statistic: 0.0,
                p_value: 1.0
            }
        );
        assert!(matches!(
            chi2_two_sided(-1, 0, 0, 3),
            Err(Error::NegativeCount)
        ));
    }

    #[test]
    fn chi2_perfect_association() {
        let r = chi2_two_sided(20, 0, 0, 20).unwrap();
        assert_eq!(r.statistic, 40.0);
        // reference value from scipy.stats.chi2.sf(40, 1)
        assert_relative_eq!(r.p_value, 2.5396285894708634e-10, max_relative = 1e-12);
    }

    #[test]
    fn bh_examples() {
        assert_eq!(
            benjamini_hochberg(&[0.01, 0.02, 0.9], 0.05),
            vec![true, true, false]
        );
        assert_eq!(benjamini_hochberg(&[1.0; 4], 0.05), vec![false; 4]);
        assert_eq!(benjamini_hochberg(&[0.0; 4], 0.05), vec![true; 4]);
        assert!(benjamini_hochberg(&[], 0.05).is_empty());
        // step-up: a later rank passing rescues earlier ones above their own threshold
        assert_eq!(
            benjamini_hochberg(&[0.04, 0.03, 0.9, 0.02], 0.2),
            vec![true, true, false, true]
        );
    }

    #[test]
    fn exclusive_positive_word_is_extracted() {
        let mut events: Vec<(&str, Polarity)> = vec![("santo", Polarity::Positive); 30];
        let others = ["a", "b", "c", "d", "e", "f"];
        for i in 0..30 {
            events.push((others[i % others.len()], Polarity::Negative));
        }
        let table = AssociationTable::from_events(events).unwrap();
        let cells = table.get("santo", Polarity::Positive).unwrap();
        assert_eq!(
            cells,
            Cells {
                a: 30,
                b: 0,
                c: 0,
                d: 30
            }
        );
        let chi = chi2_two_sided(30, 0, 0, 30).unwrap();
        assert_eq!(chi.statistic, 60.0);
        // scipy.stats.chi2.sf(60, 1)
        assert_relative_eq!(chi.p_value, 9.485737571073857e-15, max_relative = 1e-10);
        let lex = extract_lexicon(&table, 0.05, tag()).unwrap();
        assert_eq!(lex.polarity("santo"), Some(Polarity::Positive));
        assert!(lex
            .iter()
            .all(|(w, e)| w == "santo" || e.polarity == Polarity::Negative));
    }

    #[test]
    fn negative_direction_is_excluded() {
        let table = AssociationTable::from_events(
            std::iter::repeat_n(("x", Polarity::Negative), 20)
                .chain(std::iter::repeat_n(("y", Polarity::Positive), 20)),
        )
        .unwrap();
        let cands = score_candidates(&table, 0.05).unwrap();
        let x_pos = cands
            .iter()
            .find(|c| c.word == "x" && c.polarity == Polarity::Positive)
            .unwrap();
        assert!(x_pos.significant);
        assert_eq!(x_pos.direction, -1);
        let lex = resolve_candidates(&cands, tag());
        assert_eq!(lex.polarity("x"), Some(Polarity::Negative));
    }

    fn cand(word: &str, polarity: Polarity, stat: f64) -> SeedCandidate {
        SeedCandidate {
            word: word.into(),
            polarity,
            chi2_stat: stat,
            p_value: 1e-6,
            direction: 1,
            significant: true,
        }
    }

    #[test]
    fn both_polarity_conflicts_resolve_by_statistic() {
        let cands = vec![
            cand("w", Polarity::Positive, 12.0),
            cand("w", Polarity::Negative, 8.0),
            cand("t", Polarity::Positive, 5.0),
            cand("t", Polarity::Negative, 5.0),
        ];
        let lex = resolve_candidates(&cands, tag());
        assert_eq!(lex.polarity("w"), Some(Polarity::Positive));
        assert!(!lex.contains("t"));
    }

    #[test]
    fn q_must_be_a_probability() {
        let table = AssociationTable::from_events([("x", Polarity::Positive)]).unwrap();
        assert!(score_candidates(&table, 1.5).is_err());
        assert!(score_candidates(&table, 0.0).is_err());
    }
}
