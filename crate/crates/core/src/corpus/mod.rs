//! Corpus data model: publications, reference edges and the derived
//! citation index.
//!
//! A [`Corpus`] is immutable once built. Publications are addressed
//! internally by a dense [`PubIdx`]; reference edges whose cited id does not
//! resolve are kept as unlinked references.

mod index;
mod io;
mod validate;

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use index::{count_citations, CitationEvent, CitationIndex, YearWindow};
pub use io::{
    load_corpus, read_publications, read_references, write_publications, write_references,
    FileFormat, RawReference,
};
pub use validate::{validate_corpus, ValidationReport, ValidationWarning};

/// Dense index of a publication inside its corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PubIdx(pub u32);

impl PubIdx {
    #[inline]
    pub fn get(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Publication {
    pub pub_id: String,
    pub year: i32,
    pub journal_id: String,
    pub doc_type: String,
    pub categories: Vec<String>,
}

/// Cited endpoint of a reference edge.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CitedEnd {
    Linked(PubIdx),
    /// The cited id does not resolve to a publication in the corpus.
    Unlinked(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReferenceEdge {
    pub citing: PubIdx,
    pub cited: CitedEnd,
}

impl ReferenceEdge {
    pub fn linked(&self) -> Option<PubIdx> {
        match self.cited {
            CitedEnd::Linked(idx) => Some(idx),
            CitedEnd::Unlinked(_) => None,
        }
    }
}

pub const DEFAULT_CITABLE_TYPES: [&str; 3] = ["article", "review", "letter"];

/// Load-time settings for a corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusConfig {
    /// Last calendar year of citation observation.
    pub horizon_year: i32,
    /// Earliest admissible publication year, if bounded.
    pub year_min: Option<i32>,
    pub citable_types: BTreeSet<String>,
    /// Column (TSV header name or JSON key) holding the category list.
    pub category_column: String,
}

impl CorpusConfig {
    pub fn new(horizon_year: i32) -> Self {
        CorpusConfig {
            horizon_year,
            year_min: None,
            citable_types: DEFAULT_CITABLE_TYPES.iter().map(|s| s.to_string()).collect(),
            category_column: "categories".to_string(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadSummary {
    pub publications: usize,
    pub citable_publications: usize,
    pub linked_references: usize,
    pub unlinked_references: usize,
}

#[derive(Debug, Clone)]
pub struct Corpus {
    publications: Vec<Publication>,
    by_id: HashMap<String, PubIdx>,
    edges: Vec<ReferenceEdge>,
    horizon_year: i32,
    citable_types: BTreeSet<String>,
    citable: Vec<bool>,
}

impl PartialEq for Corpus {
    fn eq(&self, other: &Self) -> bool {
        self.publications == other.publications
            && self.edges == other.edges
            && self.horizon_year == other.horizon_year
            && self.citable_types == other.citable_types
    }
}

impl Corpus {
    /// Validates publications and raw `(citing_id, cited_id)` pairs and
    /// assembles a corpus. Cited ids that do not resolve become unlinked
    /// references.
    pub fn build(
        publications: Vec<Publication>,
        references: Vec<RawReference>,
        config: &CorpusConfig,
    ) -> Result<Self> {
        if publications.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let max_year = publications.iter().map(|p| p.year).max().unwrap_or(i32::MIN);
        if config.horizon_year < max_year {
            return Err(Error::Config(format!(
                "horizon year {} precedes latest publication year {}",
                config.horizon_year, max_year
            )));
        }

        let mut by_id = HashMap::with_capacity(publications.len());
        for (i, p) in publications.iter().enumerate() {
            check_publication(p, config)?;
            if by_id.insert(p.pub_id.clone(), PubIdx(i as u32)).is_some() {
                return Err(Error::DuplicatePublication(p.pub_id.clone()));
            }
        }

        let mut seen: HashSet<(PubIdx, &str)> = HashSet::with_capacity(references.len());
        let mut edges = Vec::with_capacity(references.len());
        for r in &references {
            let citing = *by_id.get(&r.citing_id).ok_or_else(|| Error::InvalidReference {
                citing: r.citing_id.clone(),
                cited: r.cited_id.clone(),
                reason: "citing id is not a publication in the corpus".into(),
            })?;
            if r.citing_id == r.cited_id {
                return Err(Error::InvalidReference {
                    citing: r.citing_id.clone(),
                    cited: r.cited_id.clone(),
                    reason: "self-reference".into(),
                });
            }
            if !seen.insert((citing, r.cited_id.as_str())) {
                return Err(Error::InvalidReference {
                    citing: r.citing_id.clone(),
                    cited: r.cited_id.clone(),
                    reason: "duplicate reference".into(),
                });
            }
            let cited = match by_id.get(&r.cited_id) {
                Some(&idx) => CitedEnd::Linked(idx),
                None => CitedEnd::Unlinked(r.cited_id.clone()),
            };
            edges.push(ReferenceEdge { citing, cited });
        }

        let citable = publications
            .iter()
            .map(|p| config.citable_types.contains(&p.doc_type))
            .collect();

        Ok(Corpus {
            publications,
            by_id,
            edges,
            horizon_year: config.horizon_year,
            citable_types: config.citable_types.clone(),
            citable,
        })
    }

    pub fn publications(&self) -> &[Publication] {
        &self.publications
    }

    pub fn publication(&self, idx: PubIdx) -> &Publication {
        &self.publications[idx.get()]
    }

    pub fn lookup(&self, pub_id: &str) -> Option<PubIdx> {
        self.by_id.get(pub_id).copied()
    }

    pub fn edges(&self) -> &[ReferenceEdge] {
        &self.edges
    }

    pub fn horizon_year(&self) -> i32 {
        self.horizon_year
    }

    pub fn citable_types(&self) -> &BTreeSet<String> {
        &self.citable_types
    }

    pub fn is_citable(&self, idx: PubIdx) -> bool {
        self.citable[idx.get()]
    }

    pub fn len(&self) -> usize {
        self.publications.len()
    }

    pub fn is_empty(&self) -> bool {
        self.publications.is_empty()
    }

    /// Citable publications in corpus order.
    pub fn citable_indices(&self) -> impl Iterator<Item = PubIdx> + '_ {
        self.citable
            .iter()
            .enumerate()
            .filter(|(_, &c)| c)
            .map(|(i, _)| PubIdx(i as u32))
    }

    pub fn summary(&self) -> LoadSummary {
        let linked = self.edges.iter().filter(|e| e.linked().is_some()).count();
        LoadSummary {
            publications: self.publications.len(),
            citable_publications: self.citable.iter().filter(|&&c| c).count(),
            linked_references: linked,
            unlinked_references: self.edges.len() - linked,
        }
    }

    /// The raw `(citing_id, cited_id)` pairs in load order.
    pub fn raw_references(&self) -> Vec<RawReference> {
        self.edges
            .iter()
            .map(|e| RawReference {
                citing_id: self.publication(e.citing).pub_id.clone(),
                cited_id: match &e.cited {
                    CitedEnd::Linked(idx) => self.publication(*idx).pub_id.clone(),
                    CitedEnd::Unlinked(id) => id.clone(),
                },
            })
            .collect()
    }
}

fn check_publication(p: &Publication, config: &CorpusConfig) -> Result<()> {
    let invalid = |reason: String| Error::InvalidPublication {
        id: p.pub_id.clone(),
        reason,
    };
    if p.pub_id.is_empty() {
        return Err(invalid("empty pub_id".into()));
    }
    if p.categories.is_empty() {
        return Err(invalid("no subject categories".into()));
    }
    let mut cats = HashSet::with_capacity(p.categories.len());
    for c in &p.categories {
        if c.is_empty() {
            return Err(invalid("empty category label".into()));
        }
        if !cats.insert(c.as_str()) {
            return Err(invalid(format!("duplicate category `{c}`")));
        }
    }
    if let Some(min) = config.year_min {
        if p.year < min {
            return Err(invalid(format!("year {} before corpus start {min}", p.year)));
        }
    }
    if p.year > config.horizon_year {
        return Err(invalid(format!(
            "year {} after horizon {}",
            p.year, config.horizon_year
        )));
    }
    Ok(())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn publication(id: &str, year: i32, cats: &[&str]) -> Publication {
        Publication {
            pub_id: id.to_string(),
            year,
            journal_id: "J1".to_string(),
            doc_type: "article".to_string(),
            categories: cats.iter().map(|c| c.to_string()).collect(),
        }
    }

    pub(crate) fn reference(citing: &str, cited: &str) -> RawReference {
        RawReference {
            citing_id: citing.to_string(),
            cited_id: cited.to_string(),
        }
    }

    fn three() -> Vec<Publication> {
        vec![
            publication("A", 2008, &["X"]),
            publication("B", 2009, &["X"]),
            publication("C", 2010, &["Y"]),
        ]
    }

    #[test]
    fn resolvable_edges_are_linked() {
        let refs = vec![reference("B", "A"), reference("C", "A")];
        let corpus = Corpus::build(three(), refs, &CorpusConfig::new(2013)).unwrap();
        let s = corpus.summary();
        assert_eq!(s.linked_references, 2);
        assert_eq!(s.unlinked_references, 0);
    }

    #[test]
    fn absent_cited_id_is_unlinked() {
        let refs = vec![reference("B", "nowhere")];
        let corpus = Corpus::build(three(), refs, &CorpusConfig::new(2013)).unwrap();
        let s = corpus.summary();
        assert_eq!(s.linked_references, 0);
        assert_eq!(s.unlinked_references, 1);
    }

    #[test]
    fn duplicate_id_is_named() {
        let mut pubs = three();
        pubs[1].pub_id = "P1".into();
        pubs[2].pub_id = "P1".into();
        let err = Corpus::build(pubs, vec![], &CorpusConfig::new(2013)).unwrap_err();
        assert!(matches!(&err, Error::DuplicatePublication(id) if id == "P1"));
        assert!(err.to_string().contains("P1"));
    }

    #[test]
    fn rejects_bad_publications_and_edges() {
        let cfg = CorpusConfig::new(2013);
        assert!(matches!(
            Corpus::build(vec![], vec![], &cfg),
            Err(Error::EmptyCorpus)
        ));

        let mut pubs = three();
        pubs[0].categories.clear();
        assert!(Corpus::build(pubs, vec![], &cfg).is_err());

        let mut pubs = three();
        pubs[0].categories = vec!["X".into(), "X".into()];
        assert!(Corpus::build(pubs, vec![], &cfg).is_err());

        assert!(Corpus::build(three(), vec![reference("A", "A")], &cfg).is_err());
        assert!(Corpus::build(
            three(),
            vec![reference("B", "A"), reference("B", "A")],
            &cfg
        )
        .is_err());
        assert!(Corpus::build(three(), vec![reference("Z", "A")], &cfg).is_err());

        // horizon before the latest publication
        assert!(Corpus::build(three(), vec![], &CorpusConfig::new(2009)).is_err());

        let mut cfg = CorpusConfig::new(2013);
        cfg.year_min = Some(2009);
        assert!(Corpus::build(three(), vec![], &cfg).is_err());
    }

    #[test]
    fn citable_filter_follows_doc_type() {
        let mut pubs = three();
        pubs[2].doc_type = "editorial".into();
        let corpus = Corpus::build(pubs, vec![], &CorpusConfig::new(2013)).unwrap();
        let citable: Vec<_> = corpus.citable_indices().collect();
        assert_eq!(citable, vec![PubIdx(0), PubIdx(1)]);
        assert_eq!(corpus.summary().citable_publications, 2);
    }
}
