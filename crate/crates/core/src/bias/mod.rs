//! Measuring evaluator bias: regression with a group indicator, synthetic
//! pools under the group model of bias, and clustering when group labels are
//! unavailable.

mod cluster;
mod ols;
mod synthetic;

pub use cluster::{cluster_groups, KMeans, KMeansResult};
pub use ols::{fit_ols, fit_ols_with, OlsOptions, RegressionFit};
pub use synthetic::{
    generate_planted_regression, generate_synthetic_pool, GroupSpec, PlantedRegression,
    RegressionData, SyntheticCandidate, SyntheticSpec,
};
