//! Evidence types and the pairwise dominance test between candidates.
//!
//! Three kinds of evidence can rank two candidates: a 1-D score interval,
//! a multi-attribute box, or a set of binary qualifications. Each comparison
//! yields [`Comparison::Above`], [`Comparison::Below`] or
//! [`Comparison::Incomparable`]; nothing is ever "equal", since distinct
//! candidates are never merged.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Outcome of comparing candidate `a` against candidate `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Comparison {
    /// `a` is ranked strictly above `b`.
    Above,
    /// `a` is ranked strictly below `b`.
    Below,
    Incomparable,
}

impl Comparison {
    pub fn reverse(self) -> Self {
        match self {
            Comparison::Above => Comparison::Below,
            Comparison::Below => Comparison::Above,
            Comparison::Incomparable => Comparison::Incomparable,
        }
    }
}

/// Something two candidates can be compared by.
pub trait Dominance {
    /// Short name of the evidence kind, used in error messages.
    const KIND: &'static str;

    fn compare(&self, other: &Self) -> Result<Comparison>;
}

/// Closed score range `[low, high]`. `low == high` is a fully trusted score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInterval<T>", into = "RawInterval<T>")]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct ScoreInterval<T> {
    low: T,
    high: T,
}

#[derive(Serialize, Deserialize)]
struct RawInterval<T> {
    low: T,
    high: T,
}

impl<T: Scalar> TryFrom<RawInterval<T>> for ScoreInterval<T> {
    type Error = Error;

    fn try_from(raw: RawInterval<T>) -> Result<Self> {
        ScoreInterval::new(raw.low, raw.high)
    }
}

impl<T: Scalar> From<ScoreInterval<T>> for RawInterval<T> {
    fn from(iv: ScoreInterval<T>) -> Self {
        RawInterval {
            low: iv.low,
            high: iv.high,
        }
    }
}

impl<T: Scalar> ScoreInterval<T> {
    pub fn new(low: T, high: T) -> Result<Self> {
        if !low.is_finite() || !high.is_finite() || low > high {
            return Err(Error::InvalidInterval {
                low: low.as_f64(),
                high: high.as_f64(),
            });
        }
        Ok(Self { low, high })
    }

    /// Degenerate interval `[score, score]`.
    pub fn point(score: T) -> Result<Self> {
        Self::new(score, score)
    }

    /// `[center - half_width, center + half_width]`.
    pub fn centered(center: T, half_width: T) -> Result<Self> {
        if half_width < T::zero() {
            return Err(Error::InvalidParameter {
                name: "half_width",
                requirement: "nonnegative",
                value: half_width.as_f64(),
            });
        }
        Self::new(center - half_width, center + half_width)
    }

    pub fn low(&self) -> T {
        self.low
    }

    pub fn high(&self) -> T {
        self.high
    }

    pub fn length(&self) -> T {
        self.high - self.low
    }

    pub fn midpoint(&self) -> T {
        self.low + (self.high - self.low) / T::lit(2.0)
    }

    pub fn contains(&self, x: T) -> bool {
        self.low <= x && x <= self.high
    }

    pub fn is_degenerate(&self) -> bool {
        self.low == self.high
    }

    /// Strict dominance: touching endpoints do not rank.
    pub fn compare_to(&self, other: &Self) -> Comparison {
        if self.low > other.high {
            Comparison::Above
        } else if self.high < other.low {
            Comparison::Below
        } else {
            Comparison::Incomparable
        }
    }
}

impl<T: Scalar> fmt::Display for ScoreInterval<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.low, self.high)
    }
}

impl<T: Scalar> Dominance for ScoreInterval<T> {
    const KIND: &'static str = "interval";

    fn compare(&self, other: &Self) -> Result<Comparison> {
        Ok(self.compare_to(other))
    }
}

/// Compares two score intervals.
pub fn compare_intervals<T: Scalar>(a: &ScoreInterval<T>, b: &ScoreInterval<T>) -> Comparison {
    a.compare_to(b)
}

/// Axis-aligned box, one interval per attribute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<ScoreInterval<T>>", into = "Vec<ScoreInterval<T>>")]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct ConfidenceRegion<T> {
    intervals: Vec<ScoreInterval<T>>,
}

impl<T: Scalar> TryFrom<Vec<ScoreInterval<T>>> for ConfidenceRegion<T> {
    type Error = Error;

    fn try_from(intervals: Vec<ScoreInterval<T>>) -> Result<Self> {
        ConfidenceRegion::new(intervals)
    }
}

impl<T: Scalar> From<ConfidenceRegion<T>> for Vec<ScoreInterval<T>> {
    fn from(region: ConfidenceRegion<T>) -> Self {
        region.intervals
    }
}

impl<T: Scalar> ConfidenceRegion<T> {
    pub fn new(intervals: Vec<ScoreInterval<T>>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::EmptyRegion);
        }
        Ok(Self { intervals })
    }

    /// Builds a box from `(low, high)` pairs.
    pub fn from_bounds(bounds: &[(T, T)]) -> Result<Self> {
        let intervals = bounds
            .iter()
            .map(|&(lo, hi)| ScoreInterval::new(lo, hi))
            .collect::<Result<Vec<_>>>()?;
        Self::new(intervals)
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[ScoreInterval<T>] {
        &self.intervals
    }

    pub fn center(&self) -> Vec<T> {
        self.intervals.iter().map(ScoreInterval::midpoint).collect()
    }

    /// Above only when above in every dimension.
    pub fn compare_to(&self, other: &Self) -> Result<Comparison> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let all = |want: Comparison| {
            self.intervals
                .iter()
                .zip(&other.intervals)
                .all(|(a, b)| a.compare_to(b) == want)
        };
        Ok(if all(Comparison::Above) {
            Comparison::Above
        } else if all(Comparison::Below) {
            Comparison::Below
        } else {
            Comparison::Incomparable
        })
    }
}

impl<T: Scalar> Dominance for ConfidenceRegion<T> {
    const KIND: &'static str = "region";

    fn compare(&self, other: &Self) -> Result<Comparison> {
        self.compare_to(other)
    }
}

pub fn compare_regions<T: Scalar>(
    a: &ConfidenceRegion<T>,
    b: &ConfidenceRegion<T>,
) -> Result<Comparison> {
    a.compare_to(b)
}

/// Finite universe of qualification tokens.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary(BTreeSet<String>);

impl Vocabulary {
    pub fn new<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self(tokens.into_iter().map(Into::into).collect())
    }

    pub fn contains(&self, token: &str) -> bool {
        self.0.contains(token)
    }
}

/// Set of qualifications held by a candidate.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeSet {
    qualifications: BTreeSet<String>,
}

impl AttributeSet {
    /// Validates every token against `vocab` and rejects repeats.
    pub fn new<I, S>(tokens: I, vocab: &Vocabulary) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut qualifications = BTreeSet::new();
        for token in tokens {
            let token = token.into();
            if !vocab.contains(&token) {
                return Err(Error::UnknownToken(token));
            }
            if !qualifications.insert(token.clone()) {
                return Err(Error::DuplicateToken(token));
            }
        }
        Ok(Self { qualifications })
    }

    pub fn qualifications(&self) -> &BTreeSet<String> {
        &self.qualifications
    }

    /// Strict superset ranks above; equal sets stay incomparable.
    pub fn compare_to(&self, other: &Self) -> Comparison {
        let (a, b) = (&self.qualifications, &other.qualifications);
        if a.len() > b.len() && a.is_superset(b) {
            Comparison::Above
        } else if a.len() < b.len() && a.is_subset(b) {
            Comparison::Below
        } else {
            Comparison::Incomparable
        }
    }
}

impl Dominance for AttributeSet {
    const KIND: &'static str = "attributes";

    fn compare(&self, other: &Self) -> Result<Comparison> {
        Ok(self.compare_to(other))
    }
}

pub fn compare_attribute_sets(a: &AttributeSet, b: &AttributeSet) -> Comparison {
    a.compare_to(b)
}

/// Evidence attached to one pool member; a pool must be homogeneous.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub enum Evidence<T> {
    Interval(ScoreInterval<T>),
    Region(ConfidenceRegion<T>),
    Attributes(AttributeSet),
}

impl<T: Scalar> Evidence<T> {
    pub fn kind(&self) -> &'static str {
        match self {
            Evidence::Interval(_) => ScoreInterval::<T>::KIND,
            Evidence::Region(_) => ConfidenceRegion::<T>::KIND,
            Evidence::Attributes(_) => AttributeSet::KIND,
        }
    }
}

impl<T: Scalar> Dominance for Evidence<T> {
    const KIND: &'static str = "evidence";

    fn compare(&self, other: &Self) -> Result<Comparison> {
        match (self, other) {
            (Evidence::Interval(a), Evidence::Interval(b)) => Ok(a.compare_to(b)),
            (Evidence::Region(a), Evidence::Region(b)) => a.compare_to(b),
            (Evidence::Attributes(a), Evidence::Attributes(b)) => Ok(a.compare_to(b)),
            _ => Err(Error::MixedEvidence {
                first: self.kind(),
                second: other.kind(),
            }),
        }
    }
}
