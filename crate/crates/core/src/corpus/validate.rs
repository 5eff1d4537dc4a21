use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{CitedEnd, Corpus};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationWarning {
    pub kind: String,
    pub citing_id: String,
    pub cited_id: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub publications: usize,
    pub citable_publications: usize,
    pub linked_references: usize,
    pub unlinked_references: usize,
    pub unlinked_ratio: f64,
    pub per_year: BTreeMap<i32, usize>,
    pub per_category: BTreeMap<String, usize>,
    pub warnings: Vec<ValidationWarning>,
}

/// Summarizes a corpus and lists soft anomalies. Never mutates.
pub fn validate_corpus(corpus: &Corpus) -> ValidationReport {
    let summary = corpus.summary();
    let mut per_year = BTreeMap::new();
    let mut per_category: BTreeMap<String, usize> = BTreeMap::new();
    for p in corpus.publications() {
        *per_year.entry(p.year).or_insert(0) += 1;
        for c in &p.categories {
            *per_category.entry(c.clone()).or_insert(0) += 1;
        }
    }

    let mut warnings = Vec::new();
    for e in corpus.edges() {
        if let CitedEnd::Linked(cited) = e.cited {
            let citing = corpus.publication(e.citing);
            let cited = corpus.publication(cited);
            if citing.year < cited.year {
                warnings.push(ValidationWarning {
                    kind: "citing_year_precedes_cited_year".into(),
                    citing_id: citing.pub_id.clone(),
                    cited_id: cited.pub_id.clone(),
                    message: format!(
                        "citing year precedes cited year ({} < {})",
                        citing.year, cited.year
                    ),
                });
            }
        }
    }

    let total_refs = summary.linked_references + summary.unlinked_references;
    ValidationReport {
        publications: summary.publications,
        citable_publications: summary.citable_publications,
        linked_references: summary.linked_references,
        unlinked_references: summary.unlinked_references,
        unlinked_ratio: if total_refs == 0 {
            0.0
        } else {
            summary.unlinked_references as f64 / total_refs as f64
        },
        per_year,
        per_category,
        warnings,
    }
}
