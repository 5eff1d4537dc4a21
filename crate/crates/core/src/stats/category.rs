use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cited::raw_citations_3y;
use crate::corpus::{CitationIndex, Corpus};
use crate::error::{Error, Result};

/// Separator between labels of a category combination.
pub const COMBINATION_SEPARATOR: &str = "; ";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CategoryMode {
    /// A paper counts once in each of its categories.
    #[default]
    Category,
    /// A paper counts once under its full category combination.
    Combination,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryRow {
    pub label: String,
    pub mean: f64,
    pub min: u32,
    pub max: u32,
    pub n: usize,
}

/// Three-year citation summaries of citable papers per category (or
/// combination), largest first. Ties in size are broken by label.
pub fn category_stats(
    corpus: &Corpus,
    index: &CitationIndex,
    mode: CategoryMode,
    top_k: Option<usize>,
) -> Vec<CategoryRow> {
    let mut groups: BTreeMap<String, Vec<u32>> = BTreeMap::new();
    for idx in corpus.citable_indices() {
        let (count, _) = raw_citations_3y(corpus, index, idx);
        let p = corpus.publication(idx);
        match mode {
            CategoryMode::Category => {
                for c in &p.categories {
                    groups.entry(c.clone()).or_default().push(count);
                }
            }
            CategoryMode::Combination => {
                let mut cats = p.categories.clone();
                cats.sort();
                groups
                    .entry(cats.join(COMBINATION_SEPARATOR))
                    .or_default()
                    .push(count);
            }
        }
    }
    let mut rows: Vec<CategoryRow> = groups
        .into_iter()
        .map(|(label, counts)| CategoryRow {
            mean: counts.iter().map(|&c| c as f64).sum::<f64>() / counts.len() as f64,
            min: counts.iter().copied().min().unwrap_or(0),
            max: counts.iter().copied().max().unwrap_or(0),
            n: counts.len(),
            label,
        })
        .collect();
    rows.sort_by(|a, b| b.n.cmp(&a.n).then_with(|| a.label.cmp(&b.label)));
    if let Some(k) = top_k {
        rows.truncate(k);
    }
    rows
}

pub fn write_category_stats(rows: &[CategoryRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["category", "mean", "min", "max", "n"])?;
    for r in rows {
        w.write_record([
            r.label.clone(),
            format!("{:.2}", r.mean),
            r.min.to_string(),
            r.max.to_string(),
            r.n.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::tests::{publication, reference};
    use crate::corpus::CorpusConfig;

    #[test]
    fn single_category_summary() {
        let pubs = vec![
            publication("A", 2008, &["X"]),
            publication("B", 2008, &["X"]),
            publication("C1", 2009, &["Y"]),
            publication("C2", 2009, &["Y"]),
            publication("C3", 2010, &["Y"]),
        ];
        let refs = vec![
            reference("C1", "A"),
            reference("C1", "B"),
            reference("C2", "B"),
            reference("C3", "B"),
        ];
        let mut pubs = pubs;
        for p in pubs.iter_mut().skip(2) {
            p.doc_type = "other".into();
        }
        let c = Corpus::build(pubs, refs, &CorpusConfig::new(2012)).unwrap();
        let rows = category_stats(&c, &CitationIndex::build(&c), CategoryMode::Category, Some(20));
        assert_eq!(rows.len(), 1);
        let r = &rows[0];
        assert_eq!((r.label.as_str(), r.mean, r.min, r.max, r.n), ("X", 2.0, 1, 3, 2));
    }

    #[test]
    fn combination_mode_and_top_k() {
        let pubs = vec![
            publication("A", 2008, &["Immunology", "Medicine"]),
            publication("B", 2008, &["Medicine", "Immunology"]),
            publication("C", 2008, &["Medicine"]),
        ];
        let c = Corpus::build(pubs, vec![], &CorpusConfig::new(2012)).unwrap();
        let idx = CitationIndex::build(&c);
        let by_cat = category_stats(&c, &idx, CategoryMode::Category, None);
        assert_eq!(by_cat.len(), 2);
        assert_eq!((by_cat[0].label.as_str(), by_cat[0].n), ("Medicine", 3));
        let combos = category_stats(&c, &idx, CategoryMode::Combination, None);
        assert_eq!(combos.len(), 2);
        assert_eq!(
            (combos[0].label.as_str(), combos[0].n),
            ("Immunology; Medicine", 2)
        );
        assert_eq!(category_stats(&c, &idx, CategoryMode::Category, Some(1)).len(), 1);
    }
}
