use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::{BootstrapOutcome, Level};
use crate::error::{Error, Result};

/// `(v - mean) / sd` with the sample (n - 1) standard deviation.
pub fn z_transform(values: &[f64]) -> Result<Vec<f64>> {
    if values.len() < 2 {
        return Err(Error::ConstantInput);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let sd = var.sqrt();
    if sd <= 0.0 || !sd.is_finite() {
        return Err(Error::ConstantInput);
    }
    Ok(values.iter().map(|v| (v - mean) / sd).collect())
}

/// Constant plus the two non-reference level effects; "Good" is the
/// reference category.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub constant: f64,
    pub very_good: f64,
    pub exceptional: f64,
}

impl Coefficients {
    pub fn as_array(&self) -> [f64; 3] {
        [self.constant, self.very_good, self.exceptional]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Coefficients {
            constant: a[0],
            very_good: a[1],
            exceptional: a[2],
        }
    }

    /// Model prediction at each level, in `Level::ALL` order.
    pub fn predictions(&self) -> [f64; 3] {
        [
            self.constant,
            self.constant + self.very_good,
            self.constant + self.exceptional,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub coefficients: Coefficients,
    pub group_sizes: [usize; 3],
    /// Bootstrap standard errors, when a bootstrap has been run.
    pub standard_errors: Option<Coefficients>,
    pub t_statistics: Option<Coefficients>,
    pub stars: Option<[String; 3]>,
    pub reps: Option<usize>,
    pub seed: Option<u64>,
}

impl RegressionResult {
    /// Attaches bootstrap standard errors, t statistics and stars.
    pub fn with_bootstrap(mut self, boot: &BootstrapOutcome, seed: u64) -> Self {
        let b = self.coefficients.as_array();
        let se = boot.coefficient_se;
        let t = [0, 1, 2].map(|k| if se[k] > 0.0 { b[k] / se[k] } else { f64::NAN });
        self.standard_errors = Some(Coefficients::from_array(se));
        self.t_statistics = Some(Coefficients::from_array(t));
        self.stars = Some(t.map(|v| significance_stars(v).to_string()));
        self.reps = Some(boot.reps);
        self.seed = Some(seed);
        self
    }
}

/// `***` when the two-sided normal p-value of `t` is below 0.001.
pub fn significance_stars(t: f64) -> &'static str {
    if !t.is_finite() {
        return "";
    }
    let normal = Normal::standard();
    let p = 2.0 * (1.0 - normal.cdf(t.abs()));
    if p < 0.001 {
        "***"
    } else {
        ""
    }
}

fn design_matrix(levels: &[Level]) -> DMatrix<f64> {
    DMatrix::from_fn(levels.len(), 3, |i, j| match j {
        0 => 1.0,
        1 => f64::from(u8::from(levels[i] == Level::VeryGood)),
        _ => f64::from(u8::from(levels[i] == Level::Exceptional)),
    })
}

pub(crate) fn group_sizes(levels: &[Level]) -> [usize; 3] {
    let mut sizes = [0usize; 3];
    for l in levels {
        sizes[l.slot()] += 1;
    }
    sizes
}

/// Least-squares coefficients via the normal equations; `None` when the
/// design is rank deficient. `X'X` and `X'y` are accumulated directly since
/// the design holds only a constant and two indicator columns.
pub(crate) fn ols(y: &[f64], levels: &[Level]) -> Option<[f64; 3]> {
    let mut n = [0.0f64; 3];
    let mut sum = [0.0f64; 3];
    for (v, l) in y.iter().zip(levels) {
        n[l.slot()] += 1.0;
        sum[l.slot()] += v;
    }
    let total = n[0] + n[1] + n[2];
    let xtx = Matrix3::new(
        total, n[1], n[2], //
        n[1], n[1], 0.0, //
        n[2], 0.0, n[2],
    );
    let xty = Vector3::new(sum[0] + sum[1] + sum[2], sum[1], sum[2]);
    let beta = xtx.cholesky()?.solve(&xty);
    Some([beta[0], beta[1], beta[2]])
}

/// Fits `z ~ 1 + [score = 2] + [score = 3]` by least squares.
pub fn fit_dummy_regression(z: &[f64], levels: &[Level]) -> Result<RegressionResult> {
    if z.len() != levels.len() {
        return Err(Error::LengthMismatch(z.len(), levels.len()));
    }
    let sizes = group_sizes(levels);
    let missing: Vec<Level> = Level::ALL
        .into_iter()
        .filter(|l| sizes[l.slot()] == 0)
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingLevels(missing));
    }
    let beta = ols(z, levels).ok_or(Error::MissingLevels(Vec::new()))?;
    Ok(RegressionResult {
        coefficients: Coefficients::from_array(beta),
        group_sizes: sizes,
        standard_errors: None,
        t_statistics: None,
        stars: None,
        reps: None,
        seed: None,
    })
}

/// Classical (homoskedastic, independent) OLS standard errors.
pub fn naive_ols_standard_errors(z: &[f64], levels: &[Level]) -> Result<Coefficients> {
    let fit = fit_dummy_regression(z, levels)?;
    let x = design_matrix(levels);
    let beta = DVector::from_column_slice(&fit.coefficients.as_array());
    let resid = DVector::from_column_slice(z) - &x * beta;
    let dof = z.len().saturating_sub(3).max(1) as f64;
    let sigma2 = resid.norm_squared() / dof;
    let inv = (x.transpose() * &x)
        .try_inverse()
        .ok_or(Error::MissingLevels(Vec::new()))?;
    Ok(Coefficients::from_array([0, 1, 2].map(|k| (sigma2 * inv[(k, k)]).sqrt())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarginCi {
    /// margin ± 1.96 · bootstrap SE
    #[default]
    Normal,
    /// 2.5th and 97.5th percentiles of the replicate margins
    Percentile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelMargin {
    pub level: Level,
    pub margin: f64,
    pub se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginsResult {
    pub method: MarginCi,
    pub levels: Vec<LevelMargin>,
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    // linear interpolation between closest ranks
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Predicted outcome at each recommendation level with bootstrap intervals.
pub fn predictive_margins(
    fit: &RegressionResult,
    boot: &BootstrapOutcome,
    method: MarginCi,
) -> MarginsResult {
    let predictions = fit.coefficients.predictions();
    let levels = Level::ALL
        .into_iter()
        .map(|level| {
            let k = level.slot();
            let margin = predictions[k];
            let se = boot.margin_se[k];
            let (ci_low, ci_high) = match method {
                MarginCi::Normal => (margin - 1.96 * se, margin + 1.96 * se),
                MarginCi::Percentile => {
                    let mut reps: Vec<f64> = boot.margin_replicates.iter().map(|m| m[k]).collect();
                    reps.sort_by(f64::total_cmp);
                    (percentile(&reps, 0.025), percentile(&reps, 0.975))
                }
            };
            LevelMargin {
                level,
                margin,
                se,
                ci_low,
                ci_high,
                n: fit.group_sizes[k],
            }
        })
        .collect();
    MarginsResult { method, levels }
}
