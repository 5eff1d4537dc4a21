//! Reproducible synthetic corpora with field- and year-dependent citation
//! cultures, plus recommendation records coupled to latent paper quality.

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Gamma as GammaDist, Normal};

use crate::corpus::{write_publications, write_references, Corpus, CorpusConfig, Publication, RawReference};
use crate::error::{Error, Result};
use crate::stats::{write_recommendations, Level, RecommendationRecord};

pub const PRESETS: [&str; 2] = ["two-cultures", "humanities-stress"];

/// Share of a paper's citations arriving in its publication year and the
/// two following years.
const CITATION_YEAR_WEIGHTS: [f64; 3] = [0.25, 0.35, 0.40];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub label: String,
    /// Mean citations per paper over the three-year window.
    pub mean_citations: f64,
    /// Gamma shape of the citation rate; smaller is more skewed.
    pub dispersion: f64,
    /// Mean linked references of a citing paper in this field.
    pub mean_linked_refs: f64,
    /// Fraction of a citing paper's references that resolve to the corpus.
    pub linked_ref_share: f64,
}

impl FieldSpec {
    fn new(label: &str, mean_citations: f64, mean_linked_refs: f64, linked_ref_share: f64) -> Self {
        FieldSpec {
            label: label.into(),
            mean_citations,
            dispersion: 1.0,
            mean_linked_refs,
            linked_ref_share,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorSpec {
    pub fields: Vec<FieldSpec>,
    pub year_start: i32,
    pub year_end: i32,
    /// Relative citation rate of the first and last publication year; the
    /// years in between are interpolated geometrically.
    pub start_year_mean: f64,
    pub end_year_mean: f64,
    /// Defaults to `year_end + 2` so no citation window is truncated.
    pub horizon_year: Option<i32>,
    pub papers_per_field_year: usize,
    pub journals_per_field: usize,
    pub coupling: f64,
    pub rater_noise: f64,
    pub recommended_share: f64,
    /// Target shares of Good, Very good and Exceptional records.
    pub level_shares: [f64; 3],
    /// Upper bound on citing papers per field and year, if any.
    pub max_citing_per_field_year: Option<usize>,
    pub seed: u64,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        GeneratorSpec {
            fields: vec![
                FieldSpec::new("Engineering and technology", 10.77, 21.54, 0.8),
                FieldSpec::new("Medical and health sciences", 16.85, 33.70, 0.8),
            ],
            year_start: 2000,
            year_end: 2010,
            start_year_mean: 22.53,
            end_year_mean: 7.34,
            horizon_year: None,
            papers_per_field_year: 4546,
            journals_per_field: 20,
            coupling: 0.6,
            rater_noise: 0.5,
            recommended_share: 0.4,
            level_shares: [0.59, 0.35, 0.06],
            max_citing_per_field_year: None,
            seed: 0,
        }
    }
}

impl GeneratorSpec {
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "two-cultures" => Ok(GeneratorSpec::default()),
            "humanities-stress" => Ok(GeneratorSpec {
                fields: vec![
                    FieldSpec::new("Humanities", 1.8, 1.5, 0.3),
                    FieldSpec::new("Natural sciences", 14.0, 28.0, 0.9),
                ],
                ..GeneratorSpec::default()
            }),
            other => Err(Error::Config(format!(
                "unknown preset {other:?}; expected one of {}",
                PRESETS.join(", ")
            ))),
        }
    }

    /// Parses a TOML spec; keys left out take the `two-cultures` defaults.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: GeneratorSpec = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn horizon(&self) -> i32 {
        self.horizon_year.unwrap_or(self.year_end + 2)
    }

    pub fn total_focal_papers(&self) -> usize {
        self.fields.len() * (self.year_end - self.year_start + 1).max(0) as usize * self.papers_per_field_year
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.fields.is_empty() {
            return bad("at least one field is required".into());
        }
        let mut labels: Vec<&str> = self.fields.iter().map(|f| f.label.as_str()).collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) || labels.iter().any(|l| l.trim().is_empty()) {
            return bad("field labels must be non-empty and unique".into());
        }
        for f in &self.fields {
            if f.mean_citations < 0.0 || !f.mean_citations.is_finite() {
                return bad(format!("{}: mean_citations must be a finite value >= 0", f.label));
            }
            if f.dispersion <= 0.0 || !f.dispersion.is_finite() {
                return bad(format!("{}: dispersion must be > 0", f.label));
            }
            if f.mean_linked_refs < 1.0 || !f.mean_linked_refs.is_finite() {
                return bad(format!("{}: mean_linked_refs must be >= 1", f.label));
            }
            if !(f.linked_ref_share > 0.0 && f.linked_ref_share <= 1.0) {
                return bad(format!("{}: linked_ref_share must be in (0, 1]", f.label));
            }
        }
        if self.year_start > self.year_end {
            return bad(format!("year_start {} after year_end {}", self.year_start, self.year_end));
        }
        if !(1000..=3000).contains(&self.year_start) || !(1000..=3000).contains(&self.horizon()) {
            return bad("years must lie within 1000..=3000".into());
        }
        if self.horizon() < self.year_end {
            return bad(format!("horizon_year {} before year_end {}", self.horizon(), self.year_end));
        }
        if !(self.start_year_mean > 0.0 && self.end_year_mean > 0.0) {
            return bad("year means must be > 0".into());
        }
        if self.papers_per_field_year == 0 || self.journals_per_field == 0 {
            return bad("papers_per_field_year and journals_per_field must be >= 1".into());
        }
        if !(0.0..=1.0).contains(&self.coupling) {
            return bad(format!("coupling {} outside [0, 1]", self.coupling));
        }
        if self.rater_noise < 0.0 || !self.rater_noise.is_finite() || !(0.0..=1.0).contains(&self.recommended_share) {
            return bad("rater_noise must be >= 0 and recommended_share in [0, 1]".into());
        }
        let total: f64 = self.level_shares.iter().sum();
        if self.level_shares.iter().any(|s| *s < 0.0) || (total - 1.0).abs() > 1e-9 {
            return bad("level_shares must be non-negative and sum to 1".into());
        }
        Ok(())
    }

    /// Citation-rate multiplier of each publication year, averaging 1.
    pub fn year_multipliers(&self) -> Vec<f64> {
        let span = (self.year_end - self.year_start) as f64;
        let (a, b) = (self.start_year_mean.ln(), self.end_year_mean.ln());
        let raw: Vec<f64> = (self.year_start..=self.year_end)
            .map(|y| {
                let t = if span > 0.0 { (y - self.year_start) as f64 / span } else { 0.0 };
                (a + t * (b - a)).exp()
            })
            .collect();
        let mean = raw.iter().sum::<f64>() / raw.len() as f64;
        raw.into_iter().map(|m| m / mean).collect()
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub corpus: Corpus,
    /// `(pub_id, latent quality)` of each focal paper, in generation order.
    pub latent_quality: Vec<(String, f64)>,
}

struct Focal {
    id: String,
    year: i32,
    /// Citations due in `year`, `year + 1` and `year + 2`.
    per_year: [u32; 3],
}

fn journal(field: &FieldSpec, k: usize) -> String {
    format!("{}-J{}", field.label, k + 1)
}

/// Generates focal papers with negative binomial citation counts and the
/// citing papers that deliver those citations.
pub fn generate_corpus(spec: &GeneratorSpec) -> Result<SyntheticCorpus> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(0);
    let horizon = spec.horizon();
    let multipliers = spec.year_multipliers();
    let std_normal = Normal::standard();

    let mut publications = Vec::with_capacity(spec.total_focal_papers() * 3 / 2);
    let mut references = Vec::new();
    let mut latent_quality = Vec::with_capacity(spec.total_focal_papers());
    let mut next_focal = 0usize;
    let mut next_citer = 0usize;
    let mut next_unlinked = 0usize;

    for field in &spec.fields {
        let gamma = Gamma::new(field.dispersion, 1.0 / field.dispersion)
            .map_err(|e| Error::Config(format!("{}: {e}", field.label)))?;
        let gamma_cdf = GammaDist::new(field.dispersion, field.dispersion)
            .map_err(|e| Error::Config(format!("{}: {e}", field.label)))?;

        let mut focal = Vec::with_capacity(spec.papers_per_field_year * multipliers.len());
        for (y_off, m) in multipliers.iter().enumerate() {
            let year = spec.year_start + y_off as i32;
            let mu = field.mean_citations * m;
            for _ in 0..spec.papers_per_field_year {
                next_focal += 1;
                let id = format!("P{next_focal:07}");
                let g: f64 = gamma.sample(&mut rng);
                let lambda = mu * g;
                let count = if lambda > 0.0 {
                    Poisson::new(lambda)
                        .map_err(|e| Error::Config(e.to_string()))?
                        .sample(&mut rng) as u32
                } else {
                    0
                };
                let u = gamma_cdf.cdf(g).clamp(1e-12, 1.0 - 1e-12);
                latent_quality.push((id.clone(), std_normal.inverse_cdf(u)));

                let mut per_year = [0u32; 3];
                let last = (horizon - year).min(2) as usize;
                let total_w: f64 = CITATION_YEAR_WEIGHTS[..=last].iter().sum();
                for _ in 0..count {
                    let mut draw = rng.random::<f64>() * total_w;
                    let mut slot = last;
                    for (k, w) in CITATION_YEAR_WEIGHTS[..=last].iter().enumerate() {
                        if draw < *w {
                            slot = k;
                            break;
                        }
                        draw -= w;
                    }
                    per_year[slot] += 1;
                }
                publications.push(Publication {
                    pub_id: id.clone(),
                    year,
                    journal_id: journal(field, rng.random_range(0..spec.journals_per_field)),
                    doc_type: "article".into(),
                    categories: vec![field.label.clone()],
                });
                focal.push(Focal { id, year, per_year });
            }
        }

        // demand per citing year: (focal position, citations needed)
        let mut demand: BTreeMap<i32, Vec<(usize, u32)>> = BTreeMap::new();
        for (i, f) in focal.iter().enumerate() {
            for (k, &need) in f.per_year.iter().enumerate() {
                if need > 0 {
                    demand.entry(f.year + k as i32).or_default().push((i, need));
                }
            }
        }
        let unlinked_ratio = (1.0 - field.linked_ref_share) / field.linked_ref_share;
        for (year, needs) in demand {
            let total: u64 = needs.iter().map(|&(_, k)| k as u64).sum();
            let widest = needs.iter().map(|&(_, k)| k as usize).max().unwrap_or(0);
            let pool = ((total as f64 / field.mean_linked_refs).ceil() as usize).max(widest);
            if let Some(cap) = spec.max_citing_per_field_year {
                if pool > cap {
                    return Err(Error::InfeasibleSpec(format!(
                        "{} in {year} needs {pool} citing papers ({total} citations, one paper alone needs {widest}) but max_citing_per_field_year is {cap}",
                        field.label
                    )));
                }
            }
            let first = next_citer;
            for _ in 0..pool {
                next_citer += 1;
                publications.push(Publication {
                    pub_id: format!("C{next_citer:07}"),
                    year,
                    journal_id: journal(field, rng.random_range(0..spec.journals_per_field)),
                    doc_type: "other".into(),
                    categories: vec![field.label.clone()],
                });
            }
            let mut linked = vec![0u32; pool];
            for (i, need) in needs {
                for c in sample(&mut rng, pool, need as usize) {
                    linked[c] += 1;
                    references.push(RawReference {
                        citing_id: format!("C{:07}", first + c + 1),
                        cited_id: focal[i].id.clone(),
                    });
                }
            }
            if unlinked_ratio > 0.0 {
                for (c, l) in linked.into_iter().enumerate() {
                    if l == 0 {
                        continue;
                    }
                    let extra = Poisson::new(l as f64 * unlinked_ratio)
                        .map_err(|e| Error::Config(e.to_string()))?
                        .sample(&mut rng) as usize;
                    for _ in 0..extra {
                        next_unlinked += 1;
                        references.push(RawReference {
                            citing_id: format!("C{:07}", first + c + 1),
                            cited_id: format!("U{next_unlinked:08}"),
                        });
                    }
                }
            }
        }
    }

    let corpus = Corpus::build(publications, references, &CorpusConfig::new(horizon))?;
    Ok(SyntheticCorpus { corpus, latent_quality })
}

/// Draws 1 to 3 recommendations for a random share of focal papers. Each
/// rater sees `u + noise`, where `u` mixes the paper's latent quality with
/// independent noise according to the coupling; levels are cut at the
/// empirical quantiles given by `level_shares`.
pub fn generate_recommendations(synthetic: &SyntheticCorpus, spec: &GeneratorSpec) -> Vec<RecommendationRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(1);
    let normal = Normal::standard();
    let gauss = rand_distr::StandardNormal;
    let c = spec.coupling;
    let rater_pool = 2000usize;

    let mut records = Vec::new();
    let mut latents = Vec::new();
    for (pub_id, q) in &synthetic.latent_quality {
        if rng.random::<f64>() >= spec.recommended_share {
            continue;
        }
        let eps: f64 = gauss.sample(&mut rng);
        let u = c * q + (1.0 - c * c).sqrt() * eps;
        let mut k = 1;
        if rng.random::<f64>() < normal.cdf(0.5 * u - 0.8) {
            k += 1;
            if rng.random::<f64>() < normal.cdf(0.5 * u - 0.3) {
                k += 1;
            }
        }
        let mut raters: Vec<usize> = Vec::with_capacity(k);
        while raters.len() < k {
            let r = rng.random_range(0..rater_pool);
            if !raters.contains(&r) {
                raters.push(r);
            }
        }
        for (seq, r) in raters.into_iter().enumerate() {
            let e: f64 = gauss.sample(&mut rng);
            latents.push(u + spec.rater_noise * e);
            records.push(RecommendationRecord {
                pub_id: pub_id.clone(),
                rater_id: format!("R{:04}", r + 1),
                score: Level::Good,
                seq: seq as u32 + 1,
            });
        }
    }

    let n = records.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| latents[a].total_cmp(&latents[b]).then(a.cmp(&b)));
    let n_good = (spec.level_shares[0] * n as f64).round() as usize;
    let n_very_good = (spec.level_shares[1] * n as f64).round() as usize;
    for (rank, &i) in order.iter().enumerate() {
        records[i].score = if rank < n_good {
            Level::Good
        } else if rank < n_good + n_very_good {
            Level::VeryGood
        } else {
            Level::Exceptional
        };
    }
    records
}

/// Writes `publications.tsv`, `references.tsv` and `recommendations.tsv`.
pub fn write_synthetic(
    synthetic: &SyntheticCorpus,
    recommendations: &[RecommendationRecord],
    dir: &Path,
) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_publications(synthetic.corpus.publications(), &dir.join("publications.tsv"))?;
    write_references(&synthetic.corpus.raw_references(), &dir.join("references.tsv"))?;
    write_recommendations(recommendations, &dir.join("recommendations.tsv"))
}
