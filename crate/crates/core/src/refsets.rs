//! Reference sets: citable publications grouped by (category, year), with
//! full-horizon citation counts.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{CitationIndex, Corpus, PubIdx, YearWindow};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SetKey {
    pub category: String,
    pub year: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Member {
    pub publication: PubIdx,
    pub citations: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSet {
    pub category: String,
    pub year: i32,
    pub members: Vec<Member>,
}

impl ReferenceSet {
    pub fn n(&self) -> usize {
        self.members.len()
    }

    pub fn counts(&self) -> Vec<u32> {
        self.members.iter().map(|m| m.citations).collect()
    }

    pub fn citations_of(&self, publication: PubIdx) -> Option<u32> {
        self.members
            .binary_search_by_key(&publication, |m| m.publication)
            .ok()
            .map(|i| self.members[i].citations)
    }
}

/// How scores from several reference sets combine for a multi-category
/// publication.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiCategoryRule {
    #[default]
    MeanOfPerCategoryScores,
}

impl fmt::Display for MultiCategoryRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MultiCategoryRule::MeanOfPerCategoryScores => f.write_str("mean_of_per_category_scores"),
        }
    }
}

pub fn combine_multi_category(rule: MultiCategoryRule, scores: &[f64]) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::EmptyScores);
    }
    match rule {
        MultiCategoryRule::MeanOfPerCategoryScores => {
            Ok(scores.iter().sum::<f64>() / scores.len() as f64)
        }
    }
}

/// Arithmetic mean of the members' citation counts.
pub fn expected_citation_rate(set: &ReferenceSet) -> f64 {
    if set.members.is_empty() {
        return 0.0;
    }
    let total: u64 = set.members.iter().map(|m| m.citations as u64).sum();
    total as f64 / set.members.len() as f64
}

#[derive(Debug, Clone)]
pub struct ReferenceSets {
    sets: BTreeMap<SetKey, ReferenceSet>,
}

impl ReferenceSets {
    pub fn get(&self, key: &SetKey) -> Option<&ReferenceSet> {
        self.sets.get(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SetKey, &ReferenceSet)> {
        self.sets.iter()
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// The sets a publication belongs to, one per category, in the order
    /// its categories are listed.
    pub fn sets_of<'a>(
        &'a self,
        corpus: &'a Corpus,
        publication: PubIdx,
    ) -> impl Iterator<Item = &'a ReferenceSet> + 'a {
        let p = corpus.publication(publication);
        p.categories.iter().filter_map(move |c| {
            self.sets.get(&SetKey {
                category: c.clone(),
                year: p.year,
            })
        })
    }

    /// One CSV row per set: category, year, n, mean, min, max.
    pub fn write_diagnostics(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["category", "year", "n", "mean", "min", "max"])?;
        for set in self.sets.values() {
            let counts = set.counts();
            let min = counts.iter().min().copied().unwrap_or(0);
            let max = counts.iter().max().copied().unwrap_or(0);
            w.write_record([
                set.category.clone(),
                set.year.to_string(),
                set.n().to_string(),
                format!("{:.6}", expected_citation_rate(set)),
                min.to_string(),
                max.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Groups citable publications into (category, year) sets. Counts cover
/// `[publication year, horizon]`.
pub fn partition_reference_sets(corpus: &Corpus, index: &CitationIndex) -> ReferenceSets {
    let horizon = corpus.horizon_year();
    let mut sets: BTreeMap<SetKey, ReferenceSet> = BTreeMap::new();
    for idx in corpus.citable_indices() {
        let p = corpus.publication(idx);
        let window = YearWindow {
            start: p.year,
            end: horizon,
        };
        let citations = index.count_in(idx, window);
        for c in &p.categories {
            sets.entry(SetKey {
                category: c.clone(),
                year: p.year,
            })
            .or_insert_with(|| ReferenceSet {
                category: c.clone(),
                year: p.year,
                members: Vec::new(),
            })
            .members
            .push(Member {
                publication: idx,
                citations,
            });
        }
    }
    ReferenceSets { sets }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::tests::{publication, reference};
    use crate::corpus::CorpusConfig;
    use proptest::prelude::*;

    fn set_of(counts: &[u32]) -> ReferenceSet {
        ReferenceSet {
            category: "X".into(),
            year: 2008,
            members: counts
                .iter()
                .enumerate()
                .map(|(i, &c)| Member {
                    publication: PubIdx(i as u32),
                    citations: c,
                })
                .collect(),
        }
    }

    #[test]
    fn expected_rate_is_mean() {
        assert!((expected_citation_rate(&set_of(&[0, 1, 2, 5, 10])) - 3.6).abs() < 1e-12);
        assert_eq!(expected_citation_rate(&set_of(&[7])), 7.0);
        assert_eq!(expected_citation_rate(&set_of(&[0, 0, 0])), 0.0);
    }

    #[test]
    fn combine_rule() {
        let rule = MultiCategoryRule::MeanOfPerCategoryScores;
        assert_eq!(combine_multi_category(rule, &[1.2]).unwrap(), 1.2);
        assert_eq!(combine_multi_category(rule, &[50.0, 70.0]).unwrap(), 60.0);
        assert!((combine_multi_category(rule, &[0.8, 1.0, 1.2]).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(
            combine_multi_category(rule, &[]),
            Err(Error::EmptyScores)
        ));
        assert_eq!(rule.to_string(), "mean_of_per_category_scores");
    }

    #[test]
    fn partition_examples() {
        let pubs = vec![
            publication("A", 2008, &["Oncology", "Immunology"]),
            publication("B", 2008, &["Oncology"]),
            publication("C", 2009, &["Immunology"]),
        ];
        let corpus = Corpus::build(pubs, vec![reference("C", "A")], &CorpusConfig::new(2010)).unwrap();
        let index = CitationIndex::build(&corpus);
        let sets = partition_reference_sets(&corpus, &index);
        let a = corpus.lookup("A").unwrap();
        let of_a: Vec<_> = sets.sets_of(&corpus, a).collect();
        assert_eq!(of_a.len(), 2);
        assert!(of_a.iter().all(|s| s.citations_of(a) == Some(1)));
        assert_eq!(sets.len(), 3);

        let pubs = (0..5).map(|i| publication(&format!("P{i}"), 2007, &["X"])).collect();
        let corpus = Corpus::build(pubs, vec![], &CorpusConfig::new(2010)).unwrap();
        let sets = partition_reference_sets(&corpus, &CitationIndex::build(&corpus));
        assert_eq!(sets.len(), 1);
        assert_eq!(sets.iter().next().unwrap().1.n(), 5);
    }

    #[test]
    fn non_citable_documents_are_excluded() {
        let mut pubs = vec![publication("A", 2008, &["X"]), publication("B", 2008, &["X"])];
        pubs[1].doc_type = "editorial".into();
        let corpus = Corpus::build(pubs, vec![reference("B", "A")], &CorpusConfig::new(2010)).unwrap();
        let sets = partition_reference_sets(&corpus, &CitationIndex::build(&corpus));
        let (_, set) = sets.iter().next().unwrap();
        assert_eq!(set.n(), 1);
        assert_eq!(set.members[0].citations, 1);
    }

    fn arb_corpus() -> impl Strategy<Value = Corpus> {
        let cats = prop::sample::subsequence(vec!["A", "B", "C"], 1..=3);
        let pubs = prop::collection::vec((2007i32..=2010, cats, any::<bool>()), 1..40);
        (pubs, prop::collection::vec((0usize..40, 0usize..40), 0..120)).prop_map(|(pubs, edges)| {
            let n = pubs.len();
            let publications: Vec<_> = pubs
                .into_iter()
                .enumerate()
                .map(|(i, (year, cats, citable))| {
                    let mut p = publication(&format!("P{i:03}"), year, &cats);
                    if !citable {
                        p.doc_type = "other".into();
                    }
                    p
                })
                .collect();
            let mut seen = std::collections::HashSet::new();
            let refs = edges
                .into_iter()
                .map(|(a, b)| (a % n, b % n))
                .filter(|&(a, b)| a != b && seen.insert((a, b)))
                .map(|(a, b)| reference(&format!("P{a:03}"), &format!("P{b:03}")))
                .collect();
            Corpus::build(publications, refs, &CorpusConfig::new(2012)).unwrap()
        })
    }

    proptest! {
        #[test]
        fn partition_is_complete_and_means_match_index(corpus in arb_corpus()) {
            let index = CitationIndex::build(&corpus);
            let sets = partition_reference_sets(&corpus, &index);
            let total: usize = sets.iter().map(|(_, s)| s.n()).sum();
            let expected: usize = corpus
                .citable_indices()
                .map(|i| corpus.publication(i).categories.len())
                .sum();
            prop_assert_eq!(total, expected);

            for (key, set) in sets.iter() {
                prop_assert!(set.n() >= 1);
                // brute-force mean from raw edges
                let mut sum = 0u64;
                for m in &set.members {
                    let p = corpus.publication(m.publication);
                    prop_assert_eq!(p.year, key.year);
                    prop_assert!(p.categories.contains(&key.category));
                    sum += corpus
                        .edges()
                        .iter()
                        .filter(|e| e.linked() == Some(m.publication))
                        .filter(|e| corpus.publication(e.citing).year >= p.year)
                        .count() as u64;
                }
                let brute = sum as f64 / set.n() as f64;
                prop_assert!((expected_citation_rate(set) - brute).abs() < 1e-12);
            }
        }

        #[test]
        fn combine_is_permutation_invariant(mut xs in prop::collection::vec(0.0f64..100.0, 1..20), c in 0.0f64..100.0) {
            let rule = MultiCategoryRule::MeanOfPerCategoryScores;
            let a = combine_multi_category(rule, &xs).unwrap();
            xs.reverse();
            let b = combine_multi_category(rule, &xs).unwrap();
            prop_assert!((a - b).abs() < 1e-9);
            let constant = vec![c; xs.len()];
            prop_assert!((combine_multi_category(rule, &constant).unwrap() - c).abs() < 1e-9);
        }
    }
}
