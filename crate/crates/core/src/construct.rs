//! Turning raw scores into score intervals.
//!
//! Four constructions are supported, each followed by an optional minimum
//! length (the error floor):
//!
//! * count-based: interval length `c / sqrt(n)` where `n` is the number of
//!   training examples from the candidate's group, either per group or the
//!   smallest such length for everyone;
//! * multiplicative bias: `[s * beta_low, s * beta_high]` for members of a
//!   group the evaluator under-scores, with factors derived from an additive
//!   bias estimate;
//! * shift and spread: `[s + offset - k*sd, s + offset + k*sd]`;
//! * human-centric: the min/max or interquartile range of several
//!   independent evaluations.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::candidate::Candidate;
use crate::error::{Error, Result};
use crate::order::{ConfidenceRegion, ScoreInterval};
use crate::scalar::Scalar;

/// How count-based lengths are assigned across groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthMode {
    PerGroup,
    /// Every candidate gets the shortest group length.
    UniformMin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    MinMax,
    Iqr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub enum IntervalMethod<T> {
    CountBased {
        c: T,
        mode: LengthMode,
    },
    MultiplicativeBias {
        /// Group the evaluator under-scores; others get `[s, s]`.
        group: String,
        /// Additive bias estimate (positive when the group is under-scored).
        b: T,
        #[serde(default = "default_delta")]
        delta: T,
    },
    ShiftSpread {
        /// Restrict to one group; `None` shifts everyone.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        group: Option<String>,
        offset: T,
        sd: T,
        k: T,
    },
    HumanCentric {
        aggregation: Aggregation,
    },
}

fn default_delta<T: Scalar>() -> T {
    T::lit(DEFAULT_DELTA)
}

/// Standard-deviation multiple used for the low/high bias anchors.
pub const DEFAULT_DELTA: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct IntervalPolicy<T> {
    #[serde(flatten)]
    pub method: IntervalMethod<T>,
    /// Minimum interval length, applied after construction.
    pub floor: T,
}

impl<T: Scalar> IntervalPolicy<T> {
    pub fn new(method: IntervalMethod<T>, floor: T) -> Self {
        Self { method, floor }
    }

    pub fn validate(&self) -> Result<()> {
        nonnegative("floor", self.floor)?;
        match &self.method {
            IntervalMethod::CountBased { c, .. } => positive("c", *c),
            IntervalMethod::MultiplicativeBias { delta, b, .. } => {
                positive("delta", *delta)?;
                finite("b", *b)
            }
            IntervalMethod::ShiftSpread { offset, sd, k, .. } => {
                finite("offset", *offset)?;
                nonnegative("sd", *sd)?;
                nonnegative("k", *k)
            }
            IntervalMethod::HumanCentric { .. } => Ok(()),
        }
    }
}

fn finite<T: Scalar>(name: &'static str, v: T) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, requirement: "finite", value: v.as_f64() })
    }
}

fn positive<T: Scalar>(name: &'static str, v: T) -> Result<()> {
    if v.is_finite() && v > T::zero() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, requirement: "positive", value: v.as_f64() })
    }
}

fn nonnegative<T: Scalar>(name: &'static str, v: T) -> Result<()> {
    if v.is_finite() && v >= T::zero() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, requirement: "nonnegative", value: v.as_f64() })
    }
}

/// Training-data summary for one group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary<T> {
    pub n: usize,
    pub mean: T,
    pub sd: T,
}

/// Per-group counts, means and standard deviations.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct GroupStats<T> {
    groups: BTreeMap<String, GroupSummary<T>>,
}

impl<T: Scalar> GroupStats<T> {
    pub fn new() -> Self {
        Self { groups: BTreeMap::new() }
    }

    pub fn insert(&mut self, label: impl Into<String>, summary: GroupSummary<T>) -> Result<()> {
        if summary.n == 0 {
            return Err(Error::EmptyGroup);
        }
        nonnegative("sd", summary.sd)?;
        finite("mean", summary.mean)?;
        self.groups.insert(label.into(), summary);
        Ok(())
    }

    pub fn with(mut self, label: impl Into<String>, n: usize, mean: T, sd: T) -> Result<Self> {
        self.insert(label, GroupSummary { n, mean, sd })?;
        Ok(self)
    }

    /// Sample statistics (`n - 1` denominator; `sd = 0` for a singleton).
    pub fn from_scores<'a, I>(scores: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, T)>,
    {
        let mut buckets: BTreeMap<String, Vec<T>> = BTreeMap::new();
        for (label, s) in scores {
            buckets.entry(label.to_owned()).or_default().push(s);
        }
        let mut stats = Self::new();
        for (label, xs) in buckets {
            let n = xs.len();
            let nf = T::from_usize(n).expect("count fits scalar");
            let mean = xs.iter().fold(T::zero(), |acc, &x| acc + x) / nf;
            let sd = if n > 1 {
                let ss = xs.iter().fold(T::zero(), |acc, &x| acc + (x - mean) * (x - mean));
                (ss / (nf - T::one())).sqrt()
            } else {
                T::zero()
            };
            stats.insert(label, GroupSummary { n, mean, sd })?;
        }
        Ok(stats)
    }

    pub fn get(&self, label: &str) -> Result<&GroupSummary<T>> {
        self.groups
            .get(label)
            .ok_or_else(|| Error::MissingGroupStats(label.to_owned()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &GroupSummary<T>)> {
        self.groups.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }
}

/// `c / sqrt(n)`.
pub fn decay_length<T: Scalar>(n: usize, c: T) -> Result<T> {
    if n == 0 {
        return Err(Error::EmptyGroup);
    }
    positive("c", c)?;
    Ok(c / T::from_usize(n).expect("count fits scalar").sqrt())
}

/// Widens `iv` symmetrically about its midpoint to at least `floor`.
pub fn apply_floor<T: Scalar>(iv: ScoreInterval<T>, floor: T) -> Result<ScoreInterval<T>> {
    nonnegative("floor", floor)?;
    if iv.length() >= floor {
        return Ok(iv);
    }
    let mid = iv.midpoint();
    let half = floor / T::lit(2.0);
    ScoreInterval::new(mid - half, mid + half)
}

pub fn apply_floor_region<T: Scalar>(
    region: ConfidenceRegion<T>,
    floor: T,
) -> Result<ConfidenceRegion<T>> {
    let intervals = region
        .intervals()
        .iter()
        .map(|&iv| apply_floor(iv, floor))
        .collect::<Result<Vec<_>>>()?;
    ConfidenceRegion::new(intervals)
}

/// Count-based intervals centered on each raw score.
pub fn build_intervals_count_based<T: Scalar>(
    scores: &BTreeMap<String, T>,
    groups: &BTreeMap<String, String>,
    stats: &GroupStats<T>,
    c: T,
    mode: LengthMode,
    floor: T,
) -> Result<BTreeMap<String, ScoreInterval<T>>> {
    let uniform = match mode {
        LengthMode::PerGroup => None,
        LengthMode::UniformMin => {
            let mut shortest: Option<T> = None;
            for (_, g) in stats.iter() {
                let r = decay_length(g.n, c)?;
                shortest = Some(shortest.map_or(r, |s| s.min(r)));
            }
            Some(shortest.ok_or_else(|| Error::MissingGroupStats(String::new()))?)
        }
    };
    let two = T::lit(2.0);
    scores
        .iter()
        .map(|(id, &s)| {
            let group = groups.get(id).ok_or_else(|| Error::MissingGroup(id.clone()))?;
            let summary = stats.get(group)?;
            let length = match uniform {
                Some(len) => len,
                None => decay_length(summary.n, c)?,
            };
            let iv = ScoreInterval::centered(s, length / two)?;
            Ok((id.clone(), apply_floor(iv, floor)?))
        })
        .collect()
}

/// `(beta_low, beta_high)` from an additive bias `b` observed on a group
/// with the given mean and standard deviation. The additive error is read
/// as a multiplicative one at `mean - delta*sd` and `mean + delta*sd`; the
/// lower anchor yields the larger factor.
pub fn multiplicative_bias_factors<T: Scalar>(mean: T, sd: T, b: T, delta: T) -> Result<(T, T)> {
    positive("delta", delta)?;
    nonnegative("sd", sd)?;
    finite("b", b)?;
    let low_anchor = mean - delta * sd;
    if !(low_anchor > T::zero()) {
        return Err(Error::NonPositiveAnchor(low_anchor.as_f64()));
    }
    let high_anchor = mean + delta * sd;
    let from_low = T::one() + b / low_anchor;
    let from_high = T::one() + b / high_anchor;
    Ok((from_low.min(from_high), from_low.max(from_high)))
}

/// `[s * beta_low, s * beta_high]`.
pub fn apply_multiplicative_interval<T: Scalar>(
    s: T,
    beta_low: T,
    beta_high: T,
) -> Result<ScoreInterval<T>> {
    if !(s > T::zero()) {
        return Err(Error::NonPositiveScore(s.as_f64()));
    }
    if beta_low > beta_high {
        return Err(Error::FactorOrder {
            low: beta_low.as_f64(),
            high: beta_high.as_f64(),
        });
    }
    ScoreInterval::new(s * beta_low, s * beta_high)
}

/// `[s + offset - k*sd, s + offset + k*sd]`.
pub fn shift_spread_interval<T: Scalar>(s: T, offset: T, sd: T, k: T) -> Result<ScoreInterval<T>> {
    nonnegative("sd", sd)?;
    nonnegative("k", k)?;
    ScoreInterval::centered(s + offset, k * sd)
}

/// Quantile by linear interpolation between order statistics of a sorted
/// slice (position `(n - 1) * q`).
fn interpolated_quantile<T: Scalar>(sorted: &[T], q: T) -> T {
    let pos = T::from_usize(sorted.len() - 1).expect("len fits scalar") * q;
    let lo = pos.floor();
    let i = lo.to_usize().expect("nonnegative index");
    let frac = pos - lo;
    if i + 1 >= sorted.len() {
        sorted[i]
    } else {
        sorted[i] + (sorted[i + 1] - sorted[i]) * frac
    }
}

/// Score range from several independent evaluations of one candidate.
pub fn human_centric_interval<T: Scalar>(
    evaluations: &[T],
    aggregation: Aggregation,
) -> Result<ScoreInterval<T>> {
    if evaluations.is_empty() {
        return Err(Error::EmptyEvaluations);
    }
    if let Some(&bad) = evaluations.iter().find(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "evaluation",
            requirement: "finite",
            value: bad.as_f64(),
        });
    }
    let mut sorted = evaluations.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    match aggregation {
        Aggregation::MinMax => ScoreInterval::new(sorted[0], sorted[sorted.len() - 1]),
        Aggregation::Iqr => {
            if sorted.len() < 2 {
                return Err(Error::InsufficientEvaluations(sorted.len()));
            }
            ScoreInterval::new(
                interpolated_quantile(&sorted, T::lit(0.25)),
                interpolated_quantile(&sorted, T::lit(0.75)),
            )
        }
    }
}

/// Applies `policy` to every candidate in `pool`.
///
/// `stats` supplies group counts (count-based) and the biased group's mean
/// and standard deviation (multiplicative). The floor is applied last, to
/// every candidate.
pub fn build_intervals<T: Scalar>(
    pool: &[Candidate<T>],
    policy: &IntervalPolicy<T>,
    stats: &GroupStats<T>,
) -> Result<BTreeMap<String, ScoreInterval<T>>> {
    policy.validate()?;
    let floor = policy.floor;
    match &policy.method {
        IntervalMethod::CountBased { c, mode } => {
            let mut scores = BTreeMap::new();
            let mut groups = BTreeMap::new();
            for cand in pool {
                scores.insert(cand.id.clone(), cand.score()?);
                groups.insert(cand.id.clone(), cand.group_label()?.to_owned());
            }
            build_intervals_count_based(&scores, &groups, stats, *c, *mode, floor)
        }
        IntervalMethod::MultiplicativeBias { group, b, delta } => {
            let summary = stats.get(group)?;
            let (lo, hi) = multiplicative_bias_factors(summary.mean, summary.sd, *b, *delta)?;
            pool.iter()
                .map(|cand| {
                    let s = cand.score()?;
                    let iv = if cand.group.as_deref() == Some(group.as_str()) {
                        apply_multiplicative_interval(s, lo, hi)?
                    } else {
                        ScoreInterval::point(s)?
                    };
                    Ok((cand.id.clone(), apply_floor(iv, floor)?))
                })
                .collect()
        }
        IntervalMethod::ShiftSpread { group, offset, sd, k } => pool
            .iter()
            .map(|cand| {
                let s = cand.score()?;
                let applies = group
                    .as_deref()
                    .map_or(true, |g| cand.group.as_deref() == Some(g));
                let iv = if applies {
                    shift_spread_interval(s, *offset, *sd, *k)?
                } else {
                    ScoreInterval::point(s)?
                };
                Ok((cand.id.clone(), apply_floor(iv, floor)?))
            })
            .collect(),
        IntervalMethod::HumanCentric { aggregation } => pool
            .iter()
            .map(|cand| {
                let iv = human_centric_interval(&cand.evaluations, *aggregation)?;
                Ok((cand.id.clone(), apply_floor(iv, floor)?))
            })
            .collect(),
    }
}
