//! Validation statistics: recommendation records, rank correlation,
//! standardization, dummy regression with cluster bootstrap, predictive
//! margins and per-category citation summaries.

mod bootstrap;
mod category;
mod correlation;
mod records;
mod regression;

pub use bootstrap::{cluster_bootstrap, BootstrapOutcome};
pub use category::{category_stats, write_category_stats, CategoryMode, CategoryRow};
pub use correlation::{mid_ranks, spearman, spearman_ci, CorrelationInterval};
pub use records::{
    dedup_first_recommendation, read_recommendations, validate_recommendations,
    write_recommendations, Level, RecommendationRecord,
};
pub use regression::{
    fit_dummy_regression, naive_ols_standard_errors, predictive_margins, significance_stars,
    z_transform, Coefficients, LevelMargin, MarginCi, MarginsResult, RegressionResult,
};
