use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 1-based ranks; ties receive the mean of the positions they occupy.
pub fn mid_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // positions i+1 ..= j
        let mid = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = mid;
        }
        i = j;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Spearman's rho as the Pearson correlation of mid-ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(Error::UndefinedCorrelation(format!(
            "need at least 3 observations, got {}",
            x.len()
        )));
    }
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(Error::UndefinedCorrelation("NaN input".into()));
    }
    pearson(&mid_ranks(x), &mid_ranks(y))
        .ok_or_else(|| Error::UndefinedCorrelation("constant vector".into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationInterval {
    pub low: f64,
    pub high: f64,
    /// Set when `|rho| = 1` and the interval collapses to a point.
    pub degenerate: bool,
}

/// 95% interval via Fisher's z with standard error `1 / sqrt(n - 3)`.
pub fn spearman_ci(rho: f64, n: usize) -> Result<CorrelationInterval> {
    if n < 4 {
        return Err(Error::UndefinedCorrelation(format!(
            "confidence interval needs n >= 4, got {n}"
        )));
    }
    if !(-1.0..=1.0).contains(&rho) {
        return Err(Error::UndefinedCorrelation(format!("rho {rho} outside [-1, 1]")));
    }
    if rho.abs() == 1.0 {
        return Ok(CorrelationInterval {
            low: rho,
            high: rho,
            degenerate: true,
        });
    }
    let z = rho.atanh();
    let half = 1.96 / ((n - 3) as f64).sqrt();
    Ok(CorrelationInterval {
        low: (z - half).tanh(),
        high: (z + half).tanh(),
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn mid_rank_ties() {
        assert_eq!(mid_ranks(&[10.0, 20.0, 10.0, 5.0]), vec![2.5, 4.0, 2.5, 1.0]);
    }

    #[test]
    fn spearman_examples() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert!((spearman(&x, &[2.0, 4.0, 6.0, 8.0, 10.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((spearman(&x, &[5.0, 4.0, 3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-12);
        // sum of squared rank differences is 4: 1 - 6*4/(5*24)
        assert!((spearman(&x, &[1.0, 3.0, 2.0, 5.0, 4.0]).unwrap() - 0.8).abs() < 1e-12);
        assert!(matches!(
            spearman(&x, &[1.0; 5]),
            Err(Error::UndefinedCorrelation(_))
        ));
        assert!(spearman(&[1.0, 2.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn fisher_interval_examples() {
        let ci = spearman_ci(0.0, 103).unwrap();
        assert!((ci.low + 0.194).abs() < 5e-4 && (ci.high - 0.194).abs() < 5e-4);

        let ci = spearman_ci(0.300, 50_082).unwrap();
        assert!((ci.low - 0.292).abs() <= 0.002 && (ci.high - 0.308).abs() <= 0.002);

        let wide = spearman_ci(0.4, 50).unwrap();
        let narrow = spearman_ci(0.4, 500).unwrap();
        assert!(narrow.high - narrow.low < wide.high - wide.low);

        let one = spearman_ci(1.0, 10).unwrap();
        assert!(one.degenerate && one.low == 1.0 && one.high == 1.0);
        assert!(spearman_ci(0.5, 3).is_err());
    }

    proptest! {
        #[test]
        fn invariant_under_monotone_transforms(
            pairs in prop::collection::vec((0u8..10, 0u8..10), 3..50)
        ) {
            let x: Vec<f64> = pairs.iter().map(|p| p.0 as f64).collect();
            let y: Vec<f64> = pairs.iter().map(|p| p.1 as f64).collect();
            if let Ok(rho) = spearman(&x, &y) {
                let tx: Vec<f64> = x.iter().map(|v| (v + 1.0).ln() * 3.0 - 7.0).collect();
                let ty: Vec<f64> = y.iter().map(|v| v.powi(3)).collect();
                prop_assert!((spearman(&tx, &ty).unwrap() - rho).abs() < 1e-12);
                prop_assert!((-1.0..=1.0).contains(&rho));
            }
        }
    }
}
