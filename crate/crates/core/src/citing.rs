//! Citing-side (source-normalized) indicators SNCS1, SNCS2 and SNCS3.
//!
//! Each citation to a focal paper is weighted by the referencing behavior
//! of the citing side, restricted to linked references whose cited year
//! falls in the `w` years ending at the citing year. `w` is the length of
//! the focal paper's citation window unless a fixed length is configured.
//! Only citations made in the `w` years starting at the publication year
//! are weighted.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{CitationIndex, Corpus, PubIdx, YearWindow};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "years")]
pub enum WindowLength {
    /// `horizon - publication year + 1`.
    #[default]
    PerPublication,
    Fixed(u32),
}

/// Sorted cited years of each publication's linked references.
#[derive(Debug, Clone)]
struct LinkedRefYears {
    offsets: Vec<usize>,
    years: Vec<i32>,
}

impl LinkedRefYears {
    fn build(corpus: &Corpus) -> Self {
        let n = corpus.len();
        let mut offsets = vec![0usize; n + 1];
        for e in corpus.edges() {
            if e.linked().is_some() {
                offsets[e.citing.get() + 1] += 1;
            }
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut years = vec![0; offsets[n]];
        for e in corpus.edges() {
            if let Some(cited) = e.linked() {
                let slot = &mut cursor[e.citing.get()];
                years[*slot] = corpus.publication(cited).year;
                *slot += 1;
            }
        }
        for i in 0..n {
            years[offsets[i]..offsets[i + 1]].sort_unstable();
        }
        LinkedRefYears { offsets, years }
    }

    fn count(&self, citing: PubIdx, window: YearWindow) -> u32 {
        let ys = &self.years[self.offsets[citing.get()]..self.offsets[citing.get() + 1]];
        let lo = ys.partition_point(|&y| y < window.start);
        let hi = ys.partition_point(|&y| y <= window.end);
        (hi - lo) as u32
    }
}

/// Referencing profile of one journal-year cohort under a window length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CohortStats {
    pub size: usize,
    /// Mean windowed linked-reference count over all cohort members.
    pub mean_linked: f64,
    /// Share of members with at least one windowed linked reference.
    pub linked_share: f64,
}

/// Citations skipped or excluded while summing SNCS weights.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnomalyTally {
    /// Citations dated before the focal publication year.
    pub pre_publication_citations: u64,
    /// In-window citations whose citing paper has no windowed linked
    /// reference.
    pub zero_linked_references: u64,
    /// In-window citations whose citing cohort averages zero windowed
    /// linked references.
    pub zero_cohort_mean: u64,
}

impl AnomalyTally {
    fn merge(mut self, other: AnomalyTally) -> Self {
        self.pre_publication_citations += other.pre_publication_citations;
        self.zero_linked_references += other.zero_linked_references;
        self.zero_cohort_mean += other.zero_cohort_mean;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SncsScores {
    pub sncs1: f64,
    pub sncs2: f64,
    pub sncs3: f64,
}

/// Weights attached to a single in-window citation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CitationWeight {
    pub citing: PubIdx,
    pub citing_year: i32,
    /// Citing paper's windowed linked-reference count.
    pub linked_refs: u32,
    pub cohort: CohortStats,
}

impl CitationWeight {
    pub fn sncs1(&self) -> Option<f64> {
        (self.cohort.mean_linked > 0.0).then(|| 1.0 / self.cohort.mean_linked)
    }

    pub fn sncs2(&self) -> Option<f64> {
        (self.linked_refs > 0).then(|| 1.0 / self.linked_refs as f64)
    }

    pub fn sncs3(&self) -> Option<f64> {
        (self.linked_refs > 0 && self.cohort.linked_share > 0.0)
            .then(|| 1.0 / (self.cohort.linked_share * self.linked_refs as f64))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CitingSideScores {
    /// One row per citable publication, in corpus order.
    pub rows: Vec<(PubIdx, SncsScores)>,
    pub anomalies: AnomalyTally,
}

type CohortKey = (u32, i32, u32);

#[derive(Debug, Clone, Default)]
pub struct CohortCache(HashMap<CohortKey, CohortStats>);

impl CohortCache {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Shared read-only state for citing-side scoring.
pub struct CitingSide<'a> {
    corpus: &'a Corpus,
    index: &'a CitationIndex,
    ref_years: LinkedRefYears,
    journal_ids: HashMap<&'a str, u32>,
    journal_of: Vec<u32>,
    cohorts: HashMap<(u32, i32), Vec<PubIdx>>,
    window: WindowLength,
}

impl<'a> CitingSide<'a> {
    pub fn new(corpus: &'a Corpus, index: &'a CitationIndex, window: WindowLength) -> Self {
        let mut journal_ids: HashMap<&str, u32> = HashMap::new();
        let mut journal_of = Vec::with_capacity(corpus.len());
        let mut cohorts: HashMap<(u32, i32), Vec<PubIdx>> = HashMap::new();
        for (i, p) in corpus.publications().iter().enumerate() {
            let next = journal_ids.len() as u32;
            let j = *journal_ids.entry(p.journal_id.as_str()).or_insert(next);
            journal_of.push(j);
            cohorts.entry((j, p.year)).or_default().push(PubIdx(i as u32));
        }
        CitingSide {
            corpus,
            index,
            ref_years: LinkedRefYears::build(corpus),
            journal_ids,
            journal_of,
            cohorts,
            window,
        }
    }

    pub fn window_length(&self, publication: PubIdx) -> u32 {
        match self.window {
            WindowLength::PerPublication => {
                (self.corpus.horizon_year() - self.corpus.publication(publication).year + 1).max(1)
                    as u32
            }
            WindowLength::Fixed(w) => w,
        }
    }

    /// Linked references of `citing` whose cited year lies in `window`.
    pub fn linked_reference_count(&self, citing: PubIdx, window: YearWindow) -> u32 {
        self.ref_years.count(citing, window)
    }

    fn reference_window(year: i32, w: u32) -> YearWindow {
        YearWindow {
            start: year - w as i32 + 1,
            end: year,
        }
    }

    fn compute_cohort(&self, journal: u32, year: i32, w: u32) -> Option<CohortStats> {
        let members = self.cohorts.get(&(journal, year))?;
        let window = Self::reference_window(year, w);
        let (mut total, mut with_refs) = (0u64, 0usize);
        for &m in members {
            let r = self.ref_years.count(m, window);
            total += r as u64;
            with_refs += usize::from(r > 0);
        }
        let size = members.len();
        Some(CohortStats {
            size,
            mean_linked: total as f64 / size as f64,
            linked_share: with_refs as f64 / size as f64,
        })
    }

    pub fn cohort_stats(&self, journal_id: &str, year: i32, w: u32) -> Result<CohortStats> {
        self.journal_ids
            .get(journal_id)
            .and_then(|&j| self.compute_cohort(j, year, w))
            .ok_or_else(|| Error::EmptyCohort {
                journal: journal_id.to_string(),
                year,
            })
    }

    /// Mean windowed linked-reference count of a journal-year cohort.
    pub fn journal_year_avg_linked_refs(&self, journal_id: &str, year: i32, w: u32) -> Result<f64> {
        self.cohort_stats(journal_id, year, w).map(|s| s.mean_linked)
    }

    /// Share of a journal-year cohort with at least one windowed linked
    /// reference.
    pub fn journal_year_linked_share(&self, journal_id: &str, year: i32, w: u32) -> Result<f64> {
        self.cohort_stats(journal_id, year, w).map(|s| s.linked_share)
    }

    fn in_window_citations(&self, publication: PubIdx) -> impl Iterator<Item = (PubIdx, i32)> + '_ {
        let start = self.corpus.publication(publication).year;
        let end = (start + self.window_length(publication) as i32 - 1).min(self.corpus.horizon_year());
        self.index
            .citations(publication)
            .iter()
            .filter(move |c| start <= c.year && c.year <= end)
            .map(|c| (c.citing, c.year))
    }

    fn cohort_key(&self, citing: PubIdx, year: i32, w: u32) -> CohortKey {
        (self.journal_of[citing.get()], year, w)
    }

    /// Computes every cohort statistic that scoring the citable
    /// publications will ask for.
    pub fn build_cache(&self) -> CohortCache {
        let mut keys: Vec<CohortKey> = self
            .corpus
            .citable_indices()
            .flat_map(|p| {
                let w = self.window_length(p);
                self.in_window_citations(p)
                    .map(move |(c, y)| self.cohort_key(c, y, w))
            })
            .collect();
        keys.sort_unstable();
        keys.dedup();
        CohortCache(
            keys.into_par_iter()
                .filter_map(|k| self.compute_cohort(k.0, k.1, k.2).map(|s| (k, s)))
                .collect(),
        )
    }

    /// Weights for each in-window citation of `publication`, plus the number
    /// of citations dated before its publication year.
    pub fn citation_weights(
        &self,
        publication: PubIdx,
        cache: Option<&CohortCache>,
    ) -> (Vec<CitationWeight>, u64) {
        let w = self.window_length(publication);
        let year = self.corpus.publication(publication).year;
        let early = self
            .index
            .citations(publication)
            .iter()
            .filter(|c| c.year < year)
            .count() as u64;
        let weights = self
            .in_window_citations(publication)
            .map(|(citing, y)| {
                let key = self.cohort_key(citing, y, w);
                let cohort = match cache.and_then(|c| c.0.get(&key)) {
                    Some(s) => *s,
                    None => self
                        .compute_cohort(key.0, key.1, key.2)
                        .expect("citing publication belongs to its own cohort"),
                };
                CitationWeight {
                    citing,
                    citing_year: y,
                    linked_refs: self.ref_years.count(citing, Self::reference_window(y, w)),
                    cohort,
                }
            })
            .collect();
        (weights, early)
    }

    pub fn score(&self, publication: PubIdx, cache: Option<&CohortCache>) -> (SncsScores, AnomalyTally) {
        let (weights, early) = self.citation_weights(publication, cache);
        let mut tally = AnomalyTally {
            pre_publication_citations: early,
            ..AnomalyTally::default()
        };
        let mut s = SncsScores {
            sncs1: 0.0,
            sncs2: 0.0,
            sncs3: 0.0,
        };
        for cw in &weights {
            match cw.sncs1() {
                Some(v) => s.sncs1 += v,
                None => tally.zero_cohort_mean += 1,
            }
            match (cw.sncs2(), cw.sncs3()) {
                (Some(v2), Some(v3)) => {
                    s.sncs2 += v2;
                    s.sncs3 += v3;
                }
                _ => tally.zero_linked_references += 1,
            }
        }
        (s, tally)
    }

    /// Scores every citable publication, sharing one cohort cache when
    /// `use_cache` is set.
    pub fn score_all(&self, use_cache: bool) -> CitingSideScores {
        let cache = use_cache.then(|| self.build_cache());
        let citable: Vec<PubIdx> = self.corpus.citable_indices().collect();
        let scored: Vec<(PubIdx, SncsScores, AnomalyTally)> = citable
            .par_iter()
            .map(|&p| {
                let (s, t) = self.score(p, cache.as_ref());
                (p, s, t)
            })
            .collect();
        let anomalies = scored
            .iter()
            .fold(AnomalyTally::default(), |acc, (_, _, t)| acc.merge(*t));
        CitingSideScores {
            rows: scored.into_iter().map(|(p, s, _)| (p, s)).collect(),
            anomalies,
        }
    }
}
