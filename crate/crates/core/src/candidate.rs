use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One applicant record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct Candidate<T> {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub features: Vec<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw_score: Option<T>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub evaluations: Vec<T>,
}

impl<T: Scalar> Candidate<T> {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            group: None,
            features: Vec::new(),
            raw_score: None,
            evaluations: Vec::new(),
        }
    }

    pub fn with_group(mut self, group: impl Into<String>) -> Self {
        self.group = Some(group.into());
        self
    }

    pub fn with_score(mut self, score: T) -> Self {
        self.raw_score = Some(score);
        self
    }

    pub fn with_features(mut self, features: Vec<T>) -> Self {
        self.features = features;
        self
    }

    pub fn with_evaluations(mut self, evaluations: Vec<T>) -> Self {
        self.evaluations = evaluations;
        self
    }

    pub fn score(&self) -> Result<T> {
        self.raw_score.ok_or_else(|| Error::MissingScore(self.id.clone()))
    }

    pub fn group_label(&self) -> Result<&str> {
        self.group
            .as_deref()
            .ok_or_else(|| Error::MissingGroup(self.id.clone()))
    }
}

/// Checks pool-level invariants: nonempty unique ids and a consistent
/// feature dimension among candidates that carry features.
pub fn validate_pool<T: Scalar>(pool: &[Candidate<T>]) -> Result<()> {
    let mut seen = BTreeSet::new();
    let mut dim: Option<usize> = None;
    for c in pool {
        if c.id.is_empty() {
            return Err(Error::EmptyId);
        }
        if !seen.insert(c.id.as_str()) {
            return Err(Error::DuplicateId(c.id.clone()));
        }
        if c.features.is_empty() {
            continue;
        }
        match dim {
            None => dim = Some(c.features.len()),
            Some(d) if d != c.features.len() => {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: c.features.len(),
                })
            }
            Some(_) => {}
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pool_validation() {
        let ok = vec![
            Candidate::new("a").with_features(vec![1.0, 2.0]),
            Candidate::new("b").with_features(vec![3.0, 4.0]),
            Candidate::new("c"),
        ];
        assert!(validate_pool(&ok).is_ok());

        let dup = vec![Candidate::<f64>::new("a"), Candidate::new("a")];
        assert_eq!(validate_pool(&dup), Err(Error::DuplicateId("a".into())));

        let empty = vec![Candidate::<f64>::new("")];
        assert_eq!(validate_pool(&empty), Err(Error::EmptyId));

        let ragged = vec![
            Candidate::new("a").with_features(vec![1.0]),
            Candidate::new("b").with_features(vec![3.0, 4.0]),
        ];
        assert!(matches!(validate_pool(&ragged), Err(Error::DimensionMismatch { .. })));
    }
}
