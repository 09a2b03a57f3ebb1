//! Partial-order screening of candidates.
//!
//! Scores that carry evaluation uncertainty or group bias are turned into
//! intervals (or multi-attribute boxes), candidates are ranked only where
//! those ranges do not overlap, and selections are drawn from the resulting
//! partial order. Audits compare group selection rates against a raw-score
//! baseline and the four-fifths screen.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix it to `f64`.

pub mod audit;
pub mod bias;
pub mod candidate;
pub mod construct;
mod error;
pub mod fixtures;
pub mod order;
pub mod poset;
mod scalar;
pub mod selection;

pub use audit::{
    audit_selection, composition_audit, four_fifths_check, four_fifths_from_counts,
    scenario_compare, selection_rates, AuditReport, CompositionTable, FourFifths, GroupRate,
    GroupRates, ScenarioComparison, ScenarioMember, FOUR_FIFTHS_THRESHOLD,
};
pub use bias::{cluster_groups, fit_ols, generate_synthetic_pool, KMeans, RegressionFit, SyntheticSpec};
pub use candidate::{validate_pool, Candidate};
pub use construct::{
    apply_floor, apply_multiplicative_interval, build_intervals, decay_length,
    human_centric_interval, multiplicative_bias_factors, shift_spread_interval, Aggregation,
    GroupStats, GroupSummary, IntervalMethod, IntervalPolicy, LengthMode,
};
pub use error::{Error, Result};
pub use order::{
    compare_attribute_sets, compare_intervals, compare_regions, AttributeSet, Comparison,
    ConfidenceRegion, Dominance, Evidence, ScoreInterval, Vocabulary,
};
pub use poset::{
    build_poset, maximal_elements, transitive_reduction, validate_poset, DominanceRelation, Poset,
    ValidationReport, Violation,
};
pub use scalar::Scalar;
pub use selection::{
    cutoff_select_intervals, cutoff_select_raw, multi_cutoff_select, top_k_poset_select,
    utilitarian_top_k, Rationale, Selection, SelectionResult,
};

pub type Interval = ScoreInterval<f64>;
pub type Region = ConfidenceRegion<f64>;
pub type Fit = RegressionFit<f64>;
pub type Policy = IntervalPolicy<f64>;
pub type Stats = GroupStats<f64>;
pub type Interval32 = ScoreInterval<f32>;
pub type Region32 = ConfidenceRegion<f32>;
