//! Cited-side indicators: MNCS, inverted InCites percentile, Hazen
//! percentile, P100 and P100′, plus the raw three-year citation count.
//!
//! Tie conventions:
//! - Hazen uses ascending mid-ranks, so every set averages exactly 50.
//! - InCites uses the descending max-rank before inversion, so the
//!   inverted value is the share of members with strictly fewer citations.
//! - P100 ranks the set's unique citation counts.
//! - P100′ ranks by the strict-lower count and divides by `n - 1`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{CitationIndex, Corpus, PubIdx, YearWindow};
use crate::error::Result;
use crate::refsets::{
    combine_multi_category, expected_citation_rate, MultiCategoryRule, ReferenceSet,
    ReferenceSets, SetKey,
};

/// Rank structure of one reference set's citation counts.
#[derive(Debug, Clone, PartialEq)]
pub struct RankContext {
    /// Sorted unique counts, strictly increasing.
    unique: Vec<u32>,
    /// Members with strictly fewer citations than `unique[k]`.
    lower: Vec<usize>,
    /// Members with exactly `unique[k]` citations.
    ties: Vec<usize>,
    n: usize,
}

impl RankContext {
    pub fn from_counts(counts: &[u32]) -> Self {
        let mut sorted = counts.to_vec();
        sorted.sort_unstable();
        let mut unique = Vec::new();
        let mut lower = Vec::new();
        let mut ties = Vec::new();
        let mut i = 0;
        while i < sorted.len() {
            let mut j = i + 1;
            while j < sorted.len() && sorted[j] == sorted[i] {
                j += 1;
            }
            unique.push(sorted[i]);
            lower.push(i);
            ties.push(j - i);
            i = j;
        }
        RankContext {
            unique,
            lower,
            ties,
            n: sorted.len(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn unique_counts(&self) -> &[u32] {
        &self.unique
    }

    /// Highest 0-based rank among unique counts.
    pub fn i_max_unique(&self) -> usize {
        self.unique.len().saturating_sub(1)
    }

    fn slot(&self, citations: u32) -> Option<usize> {
        self.unique.binary_search(&citations).ok()
    }

    /// 1-based ascending rank; tied members share the mean of their positions.
    pub fn ascending_mid_rank(&self, citations: u32) -> Option<f64> {
        self.slot(citations)
            .map(|k| self.lower[k] as f64 + (self.ties[k] as f64 + 1.0) / 2.0)
    }

    /// 1-based descending rank; tied members share the largest position.
    pub fn descending_max_rank(&self, citations: u32) -> Option<usize> {
        self.slot(citations).map(|k| self.n - self.lower[k])
    }

    pub fn strict_lower(&self, citations: u32) -> Option<usize> {
        self.slot(citations).map(|k| self.lower[k])
    }

    /// 0-based rank among unique counts.
    pub fn unique_rank(&self, citations: u32) -> Option<usize> {
        self.slot(citations)
    }

    pub fn is_degenerate(&self) -> Option<Degeneracy> {
        if self.n == 1 {
            Some(Degeneracy::Singleton)
        } else if self.unique.len() == 1 {
            Some(Degeneracy::AllEqual)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Degeneracy {
    Singleton,
    AllEqual,
}

/// Citations divided by the set's expected rate. A zero expected rate means
/// every member is uncited and therefore exactly average.
pub fn mncs_ratio(citations: u32, expected_rate: f64) -> f64 {
    if expected_rate == 0.0 {
        1.0
    } else {
        citations as f64 / expected_rate
    }
}

/// `100 - (i / n) * 100` with `i` the descending max-rank.
pub fn incites_percentile(ctx: &RankContext, citations: u32) -> Option<f64> {
    ctx.descending_max_rank(citations)
        .map(|i| 100.0 - (i as f64 / ctx.n as f64) * 100.0)
}

/// `((i - 0.5) / n) * 100` with `i` the ascending mid-rank.
pub fn hazen_percentile(ctx: &RankContext, citations: u32) -> Option<f64> {
    ctx.ascending_mid_rank(citations)
        .map(|i| (i - 0.5) / ctx.n as f64 * 100.0)
}

pub fn p100(ctx: &RankContext, citations: u32) -> Option<f64> {
    let i_max = ctx.i_max_unique();
    ctx.unique_rank(citations).map(|i| {
        if i_max == 0 {
            0.0
        } else {
            100.0 * (i as f64 / i_max as f64)
        }
    })
}

pub fn p100_prime(ctx: &RankContext, citations: u32) -> Option<f64> {
    ctx.strict_lower(citations).map(|i| {
        if ctx.n <= 1 {
            0.0
        } else {
            100.0 * (i as f64 / (ctx.n - 1) as f64)
        }
    })
}

/// Per-set scoring state shared by every member.
#[derive(Debug, Clone)]
pub struct ScoredSet {
    pub ranks: RankContext,
    pub expected_rate: f64,
}

impl ScoredSet {
    pub fn new(set: &ReferenceSet) -> Self {
        ScoredSet {
            ranks: RankContext::from_counts(&set.counts()),
            expected_rate: expected_citation_rate(set),
        }
    }

    /// `[mncs, incites, hazen, p100, p100_prime]` for a member with the
    /// given count.
    fn scores(&self, citations: u32) -> Option<[f64; 5]> {
        Some([
            mncs_ratio(citations, self.expected_rate),
            incites_percentile(&self.ranks, citations)?,
            hazen_percentile(&self.ranks, citations)?,
            p100(&self.ranks, citations)?,
            p100_prime(&self.ranks, citations)?,
        ])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CitedRow {
    pub publication: PubIdx,
    pub citations_3y: u32,
    pub mncs: f64,
    pub incites: f64,
    pub hazen: f64,
    pub p100: f64,
    pub p100_prime: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegenerateSet {
    pub category: String,
    pub year: i32,
    pub kind: Degeneracy,
}

#[derive(Debug, Clone, Default)]
pub struct CitedSideScores {
    pub rows: Vec<CitedRow>,
    pub degenerate_sets: Vec<DegenerateSet>,
    /// Publications whose three-year window runs past the horizon.
    pub truncated_window: Vec<PubIdx>,
}

/// Citations in `[year, year + 2]`, capped at the horizon. The flag is set
/// when the cap applies.
pub fn raw_citations_3y(corpus: &Corpus, index: &CitationIndex, publication: PubIdx) -> (u32, bool) {
    let year = corpus.publication(publication).year;
    let horizon = corpus.horizon_year();
    let window = YearWindow {
        start: year,
        end: (year + 2).min(horizon),
    };
    (index.count_in(publication, window), year + 2 > horizon)
}

/// Scores every citable publication. Rows follow corpus order.
pub fn score_all_cited_side(
    corpus: &Corpus,
    index: &CitationIndex,
    sets: &ReferenceSets,
    rule: MultiCategoryRule,
) -> Result<CitedSideScores> {
    let scored: HashMap<&SetKey, ScoredSet> = sets
        .iter()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(k, s)| (k, ScoredSet::new(s)))
        .collect();

    let degenerate_sets = sets
        .iter()
        .filter_map(|(k, _)| {
            scored[k].ranks.is_degenerate().map(|kind| DegenerateSet {
                category: k.category.clone(),
                year: k.year,
                kind,
            })
        })
        .collect();

    let citable: Vec<PubIdx> = corpus.citable_indices().collect();
    let rows = citable
        .par_iter()
        .map(|&idx| score_publication(corpus, index, sets, &scored, rule, idx))
        .collect::<Result<Vec<_>>>()?;

    let truncated_window = citable
        .iter()
        .copied()
        .filter(|&idx| corpus.publication(idx).year + 2 > corpus.horizon_year())
        .collect();

    Ok(CitedSideScores {
        rows,
        degenerate_sets,
        truncated_window,
    })
}

fn score_publication(
    corpus: &Corpus,
    index: &CitationIndex,
    sets: &ReferenceSets,
    scored: &HashMap<&SetKey, ScoredSet>,
    rule: MultiCategoryRule,
    idx: PubIdx,
) -> Result<CitedRow> {
    let p = corpus.publication(idx);
    let mut per_set: [Vec<f64>; 5] = Default::default();
    for c in &p.categories {
        let key = SetKey {
            category: c.clone(),
            year: p.year,
        };
        let set = sets.get(&key).expect("every citable publication is partitioned");
        let citations = set.citations_of(idx).expect("publication is a member of its set");
        let scores = scored[&key]
            .scores(citations)
            .expect("member count is present in its own rank context");
        for (acc, s) in per_set.iter_mut().zip(scores) {
            acc.push(s);
        }
    }
    let [mncs, incites, hazen, p100, p100_prime] = per_set;
    let (citations_3y, _) = raw_citations_3y(corpus, index, idx);
    Ok(CitedRow {
        publication: idx,
        citations_3y,
        mncs: combine_multi_category(rule, &mncs)?,
        incites: combine_multi_category(rule, &incites)?,
        hazen: combine_multi_category(rule, &hazen)?,
        p100: combine_multi_category(rule, &p100)?,
        p100_prime: combine_multi_category(rule, &p100_prime)?,
    })
}
