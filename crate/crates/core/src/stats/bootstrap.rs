//! Cluster bootstrap for the dummy regression.
//!
//! Whole papers are resampled with replacement. Replicate `r` draws from its
//! own ChaCha stream `(seed, r)`, so results do not depend on how replicates
//! are scheduled across threads.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::regression::{group_sizes, ols};
use super::Level;
use crate::error::{Error, Result};

/// Draw attempts allowed per replicate before giving up.
const MAX_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapOutcome {
    pub reps: usize,
    pub clusters: usize,
    /// Sample standard deviation of each coefficient across replicates.
    pub coefficient_se: [f64; 3],
    /// Sample standard deviation of each level prediction across replicates.
    pub margin_se: [f64; 3],
    /// Replicates redrawn because a level was absent.
    pub redraws: usize,
    #[serde(skip)]
    pub coefficient_replicates: Vec<[f64; 3]>,
    #[serde(skip)]
    pub margin_replicates: Vec<[f64; 3]>,
}

fn sample_sd(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    (values.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Bootstrap standard errors with `cluster_labels[i]` naming the paper of
/// record `i`.
pub fn cluster_bootstrap<L: Ord>(
    z: &[f64],
    levels: &[Level],
    cluster_labels: &[L],
    reps: usize,
    seed: u64,
) -> Result<BootstrapOutcome> {
    if z.len() != levels.len() || z.len() != cluster_labels.len() {
        return Err(Error::LengthMismatch(z.len(), levels.len().min(cluster_labels.len())));
    }
    if reps < 2 {
        return Err(Error::Config(format!("bootstrap needs at least 2 replicates, got {reps}")));
    }

    let mut grouped: BTreeMap<&L, Vec<usize>> = BTreeMap::new();
    for (i, label) in cluster_labels.iter().enumerate() {
        grouped.entry(label).or_default().push(i);
    }
    let clusters: Vec<Vec<usize>> = grouped.into_values().collect();

    let draws = (0..reps)
        .into_par_iter()
        .map(|r| replicate(z, levels, &clusters, seed, r))
        .collect::<Result<Vec<_>>>()?;

    let coefficient_replicates: Vec<[f64; 3]> = draws.iter().map(|d| d.0).collect();
    let margin_replicates: Vec<[f64; 3]> = coefficient_replicates
        .iter()
        .map(|b| [b[0], b[0] + b[1], b[0] + b[2]])
        .collect();
    let redraws = draws.iter().map(|d| d.1).sum();
    let sd_of = |reps: &[[f64; 3]], k: usize| sample_sd(reps.iter().map(move |b| b[k]));

    Ok(BootstrapOutcome {
        reps,
        clusters: clusters.len(),
        coefficient_se: [0, 1, 2].map(|k| sd_of(&coefficient_replicates, k)),
        margin_se: [0, 1, 2].map(|k| sd_of(&margin_replicates, k)),
        redraws,
        coefficient_replicates,
        margin_replicates,
    })
}

fn replicate(
    z: &[f64],
    levels: &[Level],
    clusters: &[Vec<usize>],
    seed: u64,
    r: usize,
) -> Result<([f64; 3], usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(r as u64);
    let mut zs = Vec::with_capacity(z.len());
    let mut ls = Vec::with_capacity(z.len());
    for attempt in 0..MAX_ATTEMPTS {
        zs.clear();
        ls.clear();
        for _ in 0..clusters.len() {
            let c = &clusters[rng.random_range(0..clusters.len())];
            zs.extend(c.iter().map(|&i| z[i]));
            ls.extend(c.iter().map(|&i| levels[i]));
        }
        if group_sizes(&ls).iter().all(|&n| n > 0) {
            if let Some(beta) = ols(&zs, &ls) {
                return Ok((beta, attempt));
            }
        }
    }
    Err(Error::BootstrapExhausted {
        replicate: r,
        attempts: MAX_ATTEMPTS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{naive_ols_standard_errors, z_transform};
    use rand_distr::{Distribution, Normal};

    fn data(papers: usize, per_paper: usize, shared: f64, seed: u64) -> (Vec<f64>, Vec<Level>, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, 1.0).unwrap();
        let (mut z, mut lv, mut cl) = (Vec::new(), Vec::new(), Vec::new());
        for p in 0..papers {
            let paper_effect = noise.sample(&mut rng);
            let level = Level::ALL[p % 3];
            for _ in 0..per_paper {
                let own = noise.sample(&mut rng);
                z.push(level.score() as f64 * 0.3 + shared * paper_effect + (1.0 - shared) * own);
                lv.push(level);
                cl.push(p);
            }
        }
        (z, lv, cl)
    }

    #[test]
    fn deterministic_under_seed() {
        let (z, lv, cl) = data(60, 2, 0.5, 1);
        let a = cluster_bootstrap(&z, &lv, &cl, 100, 42).unwrap();
        let b = cluster_bootstrap(&z, &lv, &cl, 100, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.coefficient_replicates, b.coefficient_replicates);
        assert!(a.coefficient_se.iter().all(|&s| s > 0.0));
        let c = cluster_bootstrap(&z, &lv, &cl, 100, 43).unwrap();
        assert_ne!(a.coefficient_se, c.coefficient_se);
    }

    #[test]
    fn singleton_clusters_match_iid_bootstrap() {
        let (z, lv, _) = data(90, 1, 0.0, 2);
        let unique: Vec<usize> = (0..z.len()).collect();
        let as_clusters = cluster_bootstrap(&z, &lv, &unique, 50, 9).unwrap();
        let labels: Vec<String> = (0..z.len()).map(|i| format!("{i:04}")).collect();
        let as_iid = cluster_bootstrap(&z, &lv, &labels, 50, 9).unwrap();
        assert_eq!(as_clusters.coefficient_se, as_iid.coefficient_se);
    }

    #[test]
    fn clustering_inflates_se_under_within_paper_agreement() {
        let (z, lv, cl) = data(150, 4, 0.9, 3);
        let z = z_transform(&z).unwrap();
        let boot = cluster_bootstrap(&z, &lv, &cl, 200, 5).unwrap();
        let naive = naive_ols_standard_errors(&z, &lv).unwrap();
        assert!(
            boot.coefficient_se[2] >= naive.exceptional,
            "cluster {} vs naive {}",
            boot.coefficient_se[2],
            naive.exceptional
        );
    }

    #[test]
    fn rejects_too_few_reps() {
        let (z, lv, cl) = data(9, 1, 0.0, 4);
        assert!(cluster_bootstrap(&z, &lv, &cl, 1, 0).is_err());
    }

    #[test]
    fn redraws_replicates_missing_a_level() {
        // single Exceptional and VeryGood clusters among 600
        let mut lv = vec![Level::Good; 600];
        lv[0] = Level::Exceptional;
        lv[1] = Level::VeryGood;
        let z: Vec<f64> = (0..600).map(|i| i as f64).collect();
        let cl: Vec<usize> = (0..600).collect();
        // each rare cluster is missed with probability (599/600)^600 ~ 0.37
        let out = cluster_bootstrap(&z, &lv, &cl, 20, 11).unwrap();
        assert!(out.redraws > 0);
    }
}
