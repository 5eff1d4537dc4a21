use citenorm_core::corpus::{
    count_citations, load_corpus, validate_corpus, write_publications, write_references, CitationIndex, Corpus,
    CorpusConfig, Publication, RawReference, YearWindow,
};
use citenorm_core::synth::{generate_corpus, GeneratorSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small_spec(seed: u64) -> GeneratorSpec {
    GeneratorSpec {
        year_start: 2005,
        year_end: 2008,
        papers_per_field_year: 40,
        journals_per_field: 4,
        seed,
        ..GeneratorSpec::default()
    }
}

fn random_corpus(seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=25usize);
    let pubs: Vec<Publication> = (0..n)
        .map(|i| Publication {
            pub_id: format!("P{i}"),
            year: rng.random_range(2000..=2010),
            journal_id: format!("J{}", rng.random_range(0..4)),
            doc_type: if rng.random_bool(0.7) { "article" } else { "editorial" }.into(),
            categories: vec![format!("C{}", rng.random_range(0..3))],
        })
        .collect();
    let mut refs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.random_bool(0.25) {
                refs.push(RawReference {
                    citing_id: format!("P{i}"),
                    cited_id: format!("P{j}"),
                });
            }
        }
    }
    Corpus::build(pubs, refs, &CorpusConfig::new(2012)).unwrap()
}

#[test]
fn tsv_and_jsonl_round_trip() {
    let synthetic = generate_corpus(&small_spec(9)).unwrap();
    let corpus = &synthetic.corpus;
    let dir = tempfile::tempdir().unwrap();
    for ext in ["tsv", "jsonl"] {
        let pubs = dir.path().join(format!("publications.{ext}"));
        let refs = dir.path().join(format!("references.{ext}"));
        write_publications(corpus.publications(), &pubs).unwrap();
        write_references(&corpus.raw_references(), &refs).unwrap();
        let reloaded = load_corpus(&pubs, &refs, &CorpusConfig::new(corpus.horizon_year())).unwrap();
        assert_eq!(&reloaded, corpus, "{ext}");
        assert_eq!(reloaded.summary(), corpus.summary());
    }
}

#[test]
fn index_build_is_deterministic() {
    let corpus = generate_corpus(&small_spec(4)).unwrap().corpus;
    let a = CitationIndex::build(&corpus);
    let b = CitationIndex::build(&corpus);
    assert_eq!(a, b);
    assert_eq!(a.total(), corpus.summary().linked_references);
}

#[test]
fn synthetic_corpus_validates_cleanly() {
    let corpus = generate_corpus(&small_spec(5)).unwrap().corpus;
    let report = validate_corpus(&corpus);
    assert!(report.warnings.is_empty());
    assert_eq!(report.citable_publications, small_spec(5).total_focal_papers());
    assert!((report.unlinked_ratio - 0.2).abs() < 0.03, "{}", report.unlinked_ratio);
}

proptest! {
    #[test]
    fn window_counts_partition(seed in any::<u64>(), split in 0i32..12) {
        let corpus = random_corpus(seed);
        let index = CitationIndex::build(&corpus);
        for idx in (0..corpus.len() as u32).map(citenorm_core::corpus::PubIdx) {
            let year = corpus.publication(idx).year;
            let full = YearWindow::new(year, 2012).unwrap();
            let total = count_citations(&index, &corpus, idx, full).unwrap();
            let on_or_after = index.citations(idx).iter().filter(|c| c.year >= year).count() as u32;
            prop_assert_eq!(total, on_or_after);
            let cut = (year + split).min(2012);
            let left = count_citations(&index, &corpus, idx, YearWindow::new(year, cut).unwrap()).unwrap();
            let right = if cut < 2012 {
                count_citations(&index, &corpus, idx, YearWindow::new(cut + 1, 2012).unwrap()).unwrap()
            } else {
                0
            };
            prop_assert_eq!(left + right, total);
            if year > 2000 {
                prop_assert!(count_citations(&index, &corpus, idx, YearWindow::new(year - 1, 2012).unwrap()).is_err());
            }
        }
    }
}
