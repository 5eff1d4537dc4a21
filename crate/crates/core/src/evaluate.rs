//! Joins indicator scores with recommendation records and produces the
//! correlation, regression and margins tables.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{
    cluster_bootstrap, dedup_first_recommendation, fit_dummy_regression, predictive_margins,
    spearman, spearman_ci, z_transform, Level, MarginCi, MarginsResult, RecommendationRecord,
    RegressionResult,
};
use crate::table::{Indicator, IndicatorTable};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationConfig {
    pub reps: usize,
    pub seed: u64,
    /// Fit regressions and margins on first recommendations only.
    pub first_only: bool,
    pub margin_ci: MarginCi,
}

impl EvaluationConfig {
    pub fn new(seed: u64) -> Self {
        EvaluationConfig {
            reps: 100,
            seed,
            first_only: false,
            margin_ci: MarginCi::Normal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationCell {
    pub rho: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub indicator: Indicator,
    pub label: String,
    pub all: CorrelationCell,
    pub first_only: CorrelationCell,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionRow {
    pub indicator: Indicator,
    pub label: String,
    pub result: RegressionResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginsRow {
    pub indicator: Indicator,
    pub label: String,
    pub margins: MarginsResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub records: usize,
    pub first_only_records: usize,
    pub papers: usize,
    pub orphan_recommendations: usize,
    pub regression_sample: String,
    pub reference_category: String,
    pub z_scope: String,
    pub z_sd_convention: String,
    pub config: EvaluationConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub correlations: Vec<CorrelationRow>,
    pub regressions: Vec<RegressionRow>,
    pub margins: Vec<MarginsRow>,
    pub meta: ReportMeta,
}

/// Indicator values and recommendation levels for one record sample.
struct Sample {
    rows: Vec<usize>,
    levels: Vec<Level>,
    papers: Vec<String>,
}

impl Sample {
    fn new(records: &[RecommendationRecord], row_of: &HashMap<&str, usize>) -> Self {
        let mut s = Sample {
            rows: Vec::new(),
            levels: Vec::new(),
            papers: Vec::new(),
        };
        for r in records {
            if let Some(&row) = row_of.get(r.pub_id.as_str()) {
                s.rows.push(row);
                s.levels.push(r.score);
                s.papers.push(r.pub_id.clone());
            }
        }
        s
    }

    fn values(&self, column: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|&r| column[r]).collect()
    }

    fn scores(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.score() as f64).collect()
    }

    fn correlate(&self, column: &[f64]) -> Result<CorrelationCell> {
        let rho = spearman(&self.scores(), &self.values(column))?;
        let ci = spearman_ci(rho, self.rows.len())?;
        Ok(CorrelationCell {
            rho,
            ci_low: ci.low,
            ci_high: ci.high,
            n: self.rows.len(),
        })
    }
}

pub fn evaluate(
    table: &IndicatorTable,
    records: &[RecommendationRecord],
    config: &EvaluationConfig,
) -> Result<EvaluationReport> {
    let row_of: HashMap<&str, usize> = table
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| (r.pub_id.as_str(), i))
        .collect();
    let all = Sample::new(records, &row_of);
    let orphans = records.len() - all.rows.len();
    if all.rows.len() < 3 {
        return Err(Error::TooFewRecords(all.rows.len()));
    }
    let joined: Vec<RecommendationRecord> = records
        .iter()
        .filter(|r| row_of.contains_key(r.pub_id.as_str()))
        .cloned()
        .collect();
    let first = Sample::new(&dedup_first_recommendation(&joined), &row_of);
    let regression_sample = if config.first_only { &first } else { &all };

    let mut correlations = Vec::new();
    let mut regressions = Vec::new();
    let mut margins = Vec::new();
    for indicator in Indicator::REPORT_ORDER {
        let Some(column) = table.column(indicator) else {
            continue;
        };
        correlations.push(CorrelationRow {
            indicator,
            label: indicator.label().into(),
            all: all.correlate(&column)?,
            first_only: first.correlate(&column)?,
        });

        let z = z_transform(&regression_sample.values(&column))?;
        let fit = fit_dummy_regression(&z, &regression_sample.levels)?;
        let boot = cluster_bootstrap(
            &z,
            &regression_sample.levels,
            &regression_sample.papers,
            config.reps,
            config.seed,
        )?;
        let fit = fit.with_bootstrap(&boot, config.seed);
        margins.push(MarginsRow {
            indicator,
            label: indicator.label().into(),
            margins: predictive_margins(&fit, &boot, config.margin_ci),
        });
        regressions.push(RegressionRow {
            indicator,
            label: indicator.label().into(),
            result: fit,
        });
    }

    Ok(EvaluationReport {
        correlations,
        regressions,
        margins,
        meta: ReportMeta {
            records: all.rows.len(),
            first_only_records: first.rows.len(),
            papers: first.rows.len(),
            orphan_recommendations: orphans,
            regression_sample: if config.first_only { "first_only" } else { "all" }.into(),
            reference_category: Level::Good.label().into(),
            z_scope: "regression sample".into(),
            z_sd_convention: "sample (n - 1)".into(),
            config: config.clone(),
        },
    })
}

impl EvaluationReport {
    /// Plot-ready margins: `level, margin, ci_low, ci_high, indicator`.
    pub fn write_margins_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["level", "margin", "ci_low", "ci_high", "indicator"])?;
        for row in &self.margins {
            for m in &row.margins.levels {
                w.write_record([
                    m.level.label().to_string(),
                    format!("{:.6}", m.margin),
                    format!("{:.6}", m.ci_low),
                    format!("{:.6}", m.ci_high),
                    row.label.clone(),
                ])?;
            }
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// Aligned plain-text rendering of the three tables.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let cell = |c: &CorrelationCell| format!("{:.3} [{:.3}, {:.3}]", c.rho, c.ci_low, c.ci_high);

        let _ = writeln!(
            out,
            "Spearman rank correlations with 95% confidence intervals\n"
        );
        let all_head = format!("All recommendations (n={})", self.meta.records);
        let first_head = format!("First recommendation (n={})", self.meta.first_only_records);
        let _ = writeln!(out, "{:<10} {:<32} {}", "Indicator", all_head, first_head);
        for r in &self.correlations {
            let _ = writeln!(out, "{:<10} {:<32} {}", r.label, cell(&r.all), cell(&r.first_only));
        }

        let n = if self.meta.regression_sample == "first_only" {
            self.meta.first_only_records
        } else {
            self.meta.records
        };
        let _ = writeln!(
            out,
            "\nRegression of z-transformed indicators on recommendations (n={n}, bootstrap reps={})\n",
            self.meta.config.reps
        );
        let _ = write!(out, "{:<28}", "");
        for r in &self.regressions {
            let _ = write!(out, "{:>14}", r.label);
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "Good (reference category)");
        for (k, name) in [(1usize, "Very good"), (2, "Exceptional"), (0, "Constant")] {
            let _ = write!(out, "{name:<28}");
            for r in &self.regressions {
                let b = r.result.coefficients.as_array()[k];
                let stars = r.result.stars.as_ref().map(|s| s[k].as_str()).unwrap_or("");
                let _ = write!(out, "{:>14}", format!("{b:.2}{stars}"));
            }
            let _ = writeln!(out);
            let _ = write!(out, "{:<28}", "");
            for r in &self.regressions {
                let t = r.result.t_statistics.map(|t| t.as_array()[k]).unwrap_or(f64::NAN);
                let _ = write!(out, "{:>14}", format!("({t:.2})"));
            }
            let _ = writeln!(out);
        }
        let _ = writeln!(out, "t statistics in parentheses; *** p < 0.001");

        let _ = writeln!(out, "\nPredictive margins with 95% confidence intervals\n");
        let _ = writeln!(
            out,
            "{:<10} {:<12} {:>9} {:>10} {:>10} {:>8}",
            "Indicator", "Level", "Margin", "CI low", "CI high", "n"
        );
        for row in &self.margins {
            for m in &row.margins.levels {
                let _ = writeln!(
                    out,
                    "{:<10} {:<12} {:>9.3} {:>10.3} {:>10.3} {:>8}",
                    row.label,
                    m.level.label(),
                    m.margin,
                    m.ci_low,
                    m.ci_high,
                    m.n
                );
            }
        }
        out
    }
}
