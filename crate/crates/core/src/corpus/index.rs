use serde::{Deserialize, Serialize};

use super::{Corpus, PubIdx, Publication};
use crate::error::{Error, Result};

/// Closed interval of calendar years.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearWindow {
    pub start: i32,
    pub end: i32,
}

impl YearWindow {
    pub fn new(start: i32, end: i32) -> Result<Self> {
        if start > end {
            return Err(Error::InvalidWindow { start, end });
        }
        Ok(YearWindow { start, end })
    }

    #[inline]
    pub fn contains(&self, year: i32) -> bool {
        self.start <= year && year <= self.end
    }
}

/// One incoming linked citation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CitationEvent {
    pub citing: PubIdx,
    pub year: i32,
}

/// Incoming linked citations per publication, stored in CSR layout and
/// ordered by citing `pub_id` within each entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CitationIndex {
    offsets: Vec<usize>,
    events: Vec<CitationEvent>,
}

impl CitationIndex {
    pub fn build(corpus: &Corpus) -> Self {
        let n = corpus.len();
        let mut offsets = vec![0usize; n + 1];
        for e in corpus.edges() {
            if let Some(cited) = e.linked() {
                offsets[cited.get() + 1] += 1;
            }
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut events = vec![
            CitationEvent {
                citing: PubIdx(0),
                year: 0
            };
            offsets[n]
        ];
        for e in corpus.edges() {
            if let Some(cited) = e.linked() {
                let slot = &mut cursor[cited.get()];
                events[*slot] = CitationEvent {
                    citing: e.citing,
                    year: corpus.publication(e.citing).year,
                };
                *slot += 1;
            }
        }
        for i in 0..n {
            events[offsets[i]..offsets[i + 1]]
                .sort_by(|a, b| corpus.publication(a.citing).pub_id.cmp(&corpus.publication(b.citing).pub_id));
        }
        CitationIndex { offsets, events }
    }

    pub fn citations(&self, cited: PubIdx) -> &[CitationEvent] {
        &self.events[self.offsets[cited.get()]..self.offsets[cited.get() + 1]]
    }

    /// Total number of citation events (equals the number of linked edges).
    pub fn total(&self) -> usize {
        self.events.len()
    }

    /// Citations to `cited` whose citing year falls in `window`; no
    /// precondition check.
    pub(crate) fn count_in(&self, cited: PubIdx, window: YearWindow) -> u32 {
        self.citations(cited)
            .iter()
            .filter(|c| window.contains(c.year))
            .count() as u32
    }
}

/// Citations received by `publication` within `window`. The window may not
/// start before the publication year.
pub fn count_citations(
    index: &CitationIndex,
    corpus: &Corpus,
    publication: PubIdx,
    window: YearWindow,
) -> Result<u32> {
    let Publication { year, .. } = corpus.publication(publication);
    if window.start < *year {
        return Err(Error::WindowBeforePublication {
            start: window.start,
            year: *year,
        });
    }
    Ok(index.count_in(publication, window))
}
