use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::candidate::Candidate;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One group of a synthetic pool. `beta > 1` means the evaluator
/// under-scores the group: a true score `s` is observed as `s / beta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub label: String,
    pub size: usize,
    pub mean: f64,
    pub sd: f64,
    #[serde(default = "unit")]
    pub beta: f64,
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub groups: Vec<GroupSpec>,
    #[serde(default)]
    pub noise_sd: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let mut labels = BTreeSet::new();
        for g in &self.groups {
            if g.size == 0 {
                return Err(Error::EmptyGroup);
            }
            if !labels.insert(g.label.as_str()) {
                return Err(Error::DuplicateId(g.label.clone()));
            }
            check("beta", g.beta, g.beta > 0.0, "positive")?;
            check("sd", g.sd, g.sd >= 0.0, "nonnegative")?;
            check("mean", g.mean, true, "finite")?;
        }
        check("noise_sd", self.noise_sd, self.noise_sd >= 0.0, "nonnegative")
    }
}

fn check(name: &'static str, value: f64, ok: bool, requirement: &'static str) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, requirement, value })
    }
}

/// A generated candidate together with the latent score it was drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct SyntheticCandidate<T> {
    pub candidate: Candidate<T>,
    pub true_score: T,
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Draws true scores per group and observes them as `true / beta + noise`.
/// Output follows the order of `spec.groups`; ids are `<label>-<index>`.
pub fn generate_synthetic_pool<T: Scalar>(spec: &SyntheticSpec) -> Result<Vec<SyntheticCandidate<T>>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let width = spec
        .groups
        .iter()
        .map(|g| g.size.to_string().len())
        .max()
        .unwrap_or(1);
    let mut pool = Vec::new();
    for g in &spec.groups {
        for i in 0..g.size {
            let truth = g.mean + g.sd * normal(&mut rng);
            let observed = truth / g.beta + spec.noise_sd * normal(&mut rng);
            pool.push(SyntheticCandidate {
                candidate: Candidate::new(format!("{}-{:0width$}", g.label, i))
                    .with_group(g.label.clone())
                    .with_score(T::lit(observed)),
                true_score: T::lit(truth),
            });
        }
    }
    Ok(pool)
}

/// Linear data with a planted additive group effect, for checking that a
/// regression recovers it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedRegression {
    pub n: usize,
    pub feature_coefficients: Vec<f64>,
    pub intercept: f64,
    pub group_effect: f64,
    /// Probability a row belongs to the indicated group.
    pub group_fraction: f64,
    pub feature_mean: f64,
    pub feature_sd: f64,
    pub noise_sd: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionData<T> {
    pub features: Vec<Vec<T>>,
    pub group: Vec<T>,
    pub targets: Vec<T>,
}

pub fn generate_planted_regression<T: Scalar>(spec: &PlantedRegression) -> Result<RegressionData<T>> {
    check(
        "group_fraction",
        spec.group_fraction,
        (0.0..=1.0).contains(&spec.group_fraction),
        "in [0, 1]",
    )?;
    check("noise_sd", spec.noise_sd, spec.noise_sd >= 0.0, "nonnegative")?;
    check("feature_sd", spec.feature_sd, spec.feature_sd >= 0.0, "nonnegative")?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut data = RegressionData {
        features: Vec::with_capacity(spec.n),
        group: Vec::with_capacity(spec.n),
        targets: Vec::with_capacity(spec.n),
    };
    for _ in 0..spec.n {
        let x: Vec<f64> = spec
            .feature_coefficients
            .iter()
            .map(|_| spec.feature_mean + spec.feature_sd * normal(&mut rng))
            .collect();
        let g = if rng.random::<f64>() < spec.group_fraction { 1.0 } else { 0.0 };
        let signal = x
            .iter()
            .zip(&spec.feature_coefficients)
            .fold(spec.intercept + spec.group_effect * g, |acc, (x, w)| acc + x * w);
        let y = signal + spec.noise_sd * normal(&mut rng);
        data.features.push(x.into_iter().map(T::lit).collect());
        data.group.push(T::lit(g));
        data.targets.push(T::lit(y));
    }
    Ok(data)
}
