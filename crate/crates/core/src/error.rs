use thiserror::Error;

use crate::poset::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid interval: low {low} exceeds high {high} or is not finite")]
    InvalidInterval { low: f64, high: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("confidence region needs at least one dimension")]
    EmptyRegion,

    #[error("pool mixes evidence kinds ({first} and {second})")]
    MixedEvidence {
        first: &'static str,
        second: &'static str,
    },

    #[error("duplicate candidate id `{0}`")]
    DuplicateId(String),

    #[error("candidate id must be nonempty")]
    EmptyId,

    #[error("unknown candidate id `{0}`")]
    UnknownId(String),

    #[error("relation is not a strict partial order: {0}")]
    InvalidPoset(ValidationReport),

    #[error("token `{0}` is not in the declared vocabulary")]
    UnknownToken(String),

    #[error("token `{0}` listed more than once")]
    DuplicateToken(String),

    #[error("group count must be at least 1")]
    EmptyGroup,

    #[error("parameter `{name}` must be {requirement}, got {value}")]
    InvalidParameter {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },

    #[error("no group statistics for group `{0}`")]
    MissingGroupStats(String),

    #[error("candidate `{0}` has no group label")]
    MissingGroup(String),

    #[error("candidate `{0}` has no raw score")]
    MissingScore(String),

    #[error("multiplicative model needs a positive low anchor (mean - delta*sd), got {0}")]
    NonPositiveAnchor(f64),

    #[error("multiplicative interval needs a positive score, got {0}")]
    NonPositiveScore(f64),

    #[error("bias factors out of order: low {low} > high {high}")]
    FactorOrder { low: f64, high: f64 },

    #[error("no evaluations supplied")]
    EmptyEvaluations,

    #[error("interquartile aggregation needs at least 2 evaluations, got {0}")]
    InsufficientEvaluations(usize),

    #[error("design matrix is rank deficient: column {column} is collinear with columns {depends_on:?}")]
    RankDeficient {
        column: usize,
        depends_on: Vec<usize>,
    },

    #[error("regression needs more rows ({rows}) than coefficients ({coefficients})")]
    InsufficientRows { rows: usize, coefficients: usize },

    #[error("input lengths disagree: {what} has {found} entries, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("k = {k} exceeds pool size {n}")]
    KTooLarge { k: usize, n: usize },

    #[error("k must be at least 1")]
    ZeroK,

    #[error("cutoff list is empty")]
    EmptyCutoffs,

    #[error("selected id `{0}` is not in the pool")]
    SelectedNotInPool(String),

    #[error("no group has a defined selection rate")]
    NoDefinedRates,
}
