//! Selecting candidates from raw scores, intervals, regions or a poset.
//!
//! Cutoff selectors use "possibly qualified" semantics: a candidate passes
//! when any point of their interval (or region) clears the bar, and the bar
//! itself counts as clearing it. The poset selector fills slots one maximal
//! layer at a time and draws uniformly at random only from the layer that
//! does not fit.

use std::collections::BTreeMap;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::order::{ConfidenceRegion, ScoreInterval};
use crate::poset::Poset;
use crate::scalar::Scalar;

/// Why a candidate was selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rationale {
    MetCutoffRaw,
    PossiblyQualified,
    Maximal,
    RandomAmongMaximal,
    TopScore,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selection {
    pub id: String,
    pub rationale: Rationale,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub selected: Vec<Selection>,
    /// RNG seed for randomizing modes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl SelectionResult {
    fn deterministic<I: IntoIterator<Item = String>>(ids: I, rationale: Rationale) -> Self {
        Self {
            selected: ids.into_iter().map(|id| Selection { id, rationale }).collect(),
            seed: None,
        }
    }

    pub fn ids(&self) -> Vec<&str> {
        self.selected.iter().map(|s| s.id.as_str()).collect()
    }

    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.selected.iter().any(|s| s.id == id)
    }

    pub fn rationale_counts(&self) -> BTreeMap<Rationale, usize> {
        let mut counts = BTreeMap::new();
        for s in &self.selected {
            *counts.entry(s.rationale).or_insert(0) += 1;
        }
        counts
    }
}

/// Ids whose raw score is at least `cutoff`, in id order.
pub fn cutoff_select_raw<T: Scalar>(scores: &BTreeMap<String, T>, cutoff: T) -> SelectionResult {
    SelectionResult::deterministic(
        scores
            .iter()
            .filter(|(_, &s)| s >= cutoff)
            .map(|(id, _)| id.clone()),
        Rationale::MetCutoffRaw,
    )
}

/// Ids whose interval reaches `cutoff`, in id order.
pub fn cutoff_select_intervals<T: Scalar>(
    intervals: &BTreeMap<String, ScoreInterval<T>>,
    cutoff: T,
) -> SelectionResult {
    SelectionResult::deterministic(
        intervals
            .iter()
            .filter(|(_, iv)| iv.high() >= cutoff)
            .map(|(id, _)| id.clone()),
        Rationale::PossiblyQualified,
    )
}

/// Ids whose region reaches every per-attribute cutoff.
pub fn multi_cutoff_select<T: Scalar>(
    regions: &BTreeMap<String, ConfidenceRegion<T>>,
    cutoffs: &[T],
) -> Result<SelectionResult> {
    if cutoffs.is_empty() {
        return Err(Error::EmptyCutoffs);
    }
    let mut ids = Vec::new();
    for (id, region) in regions {
        if region.dim() != cutoffs.len() {
            return Err(Error::DimensionMismatch {
                expected: cutoffs.len(),
                found: region.dim(),
            });
        }
        if region
            .intervals()
            .iter()
            .zip(cutoffs)
            .all(|(iv, &c)| iv.high() >= c)
        {
            ids.push(id.clone());
        }
    }
    Ok(SelectionResult::deterministic(ids, Rationale::PossiblyQualified))
}

/// Top `k` by maximality, randomizing where incomparability forces a choice.
///
/// While slots remain, take the maximal elements of what is left. If they
/// all fit, select them (`Maximal`); otherwise draw the remaining number
/// uniformly without replacement from that layer (`RandomAmongMaximal`).
pub fn top_k_poset_select(p: &Poset, k: usize, seed: u64) -> Result<SelectionResult> {
    let n = p.len();
    if k > n {
        return Err(Error::KTooLarge { k, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut removed = vec![false; n];
    let mut selected = Vec::with_capacity(k);
    while selected.len() < k {
        // Removed elements form an up-set, so an element is maximal among
        // the rest exactly when all of its direct successors are gone.
        let layer: Vec<usize> = (0..n)
            .filter(|&i| !removed[i] && p.successors(i).iter().all(|&j| removed[j]))
            .collect();
        let slots = k - selected.len();
        if layer.len() <= slots {
            for &i in &layer {
                removed[i] = true;
                selected.push(Selection { id: p.id(i).to_owned(), rationale: Rationale::Maximal });
            }
        } else {
            let mut picks = index::sample(&mut rng, layer.len(), slots).into_vec();
            picks.sort_unstable();
            for pick in picks {
                let i = layer[pick];
                removed[i] = true;
                selected.push(Selection {
                    id: p.id(i).to_owned(),
                    rationale: Rationale::RandomAmongMaximal,
                });
            }
        }
    }
    Ok(SelectionResult { selected, seed: Some(seed) })
}

/// Highest `k` scores; ties broken by lexicographically smaller id.
pub fn utilitarian_top_k<T: Scalar>(scores: &BTreeMap<String, T>, k: usize) -> Result<SelectionResult> {
    if k > scores.len() {
        return Err(Error::KTooLarge { k, n: scores.len() });
    }
    let mut ranked: Vec<(&String, T)> = scores.iter().map(|(id, &s)| (id, s)).collect();
    ranked.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.0.cmp(b.0))
    });
    Ok(SelectionResult::deterministic(
        ranked.into_iter().take(k).map(|(id, _)| id.clone()),
        Rationale::TopScore,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::build_poset;

    fn scores(items: &[(&str, f64)]) -> BTreeMap<String, f64> {
        items.iter().map(|&(id, s)| (id.to_owned(), s)).collect()
    }

    fn intervals(items: &[(&str, f64, f64)]) -> BTreeMap<String, ScoreInterval<f64>> {
        items
            .iter()
            .map(|&(id, lo, hi)| (id.to_owned(), ScoreInterval::new(lo, hi).unwrap()))
            .collect()
    }

    #[test]
    fn raw_cutoff_examples() {
        let s = scores(&[("a", 3.0), ("b", 2.5), ("c", 1.8)]);
        assert_eq!(cutoff_select_raw(&s, 2.3).ids(), vec!["a", "b"]);
        assert_eq!(cutoff_select_raw(&s, 0.0).len(), 3);
        assert!(cutoff_select_raw(&s, 9.0).is_empty());
        assert_eq!(cutoff_select_raw(&s, 2.5).ids(), vec!["a", "b"]);
        assert!(cutoff_select_raw(&s, 2.3).seed.is_none());
    }

    #[test]
    fn interval_cutoff_examples() {
        let iv = intervals(&[("a", 1.05, 2.55), ("b", 0.0, 2.29), ("c", 2.0, 2.0)]);
        let r = cutoff_select_intervals(&iv, 2.3);
        assert_eq!(r.ids(), vec!["a"]);
        assert_eq!(r.selected[0].rationale, Rationale::PossiblyQualified);
        assert_eq!(cutoff_select_intervals(&iv, 2.0).ids(), vec!["a", "b", "c"]);
    }

    #[test]
    fn multi_cutoff_errors() {
        let regions: BTreeMap<String, ConfidenceRegion<f64>> = BTreeMap::from([(
            "a".to_owned(),
            ConfidenceRegion::from_bounds(&[(0.0, 1.0), (0.0, 1.0)]).unwrap(),
        )]);
        assert_eq!(multi_cutoff_select(&regions, &[]), Err(Error::EmptyCutoffs));
        assert!(matches!(
            multi_cutoff_select(&regions, &[0.5]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert_eq!(multi_cutoff_select(&regions, &[-1e9, -1e9]).unwrap().ids(), vec!["a"]);
    }

    #[test]
    fn utilitarian_examples() {
        let s = scores(&[("A", 82.0), ("B", 68.0), ("C", 67.0)]);
        assert_eq!(utilitarian_top_k(&s, 2).unwrap().ids(), vec!["A", "B"]);
        assert!(utilitarian_top_k(&s, 0).unwrap().is_empty());
        assert_eq!(utilitarian_top_k(&s, 4), Err(Error::KTooLarge { k: 4, n: 3 }));

        let tied = scores(&[("z", 5.0), ("y", 5.0), ("x", 9.0)]);
        assert_eq!(utilitarian_top_k(&tied, 2).unwrap().ids(), vec!["x", "y"]);
    }

    #[test]
    fn poset_top_k_on_chain_is_deterministic() {
        let p = Poset::new(&["a", "b", "c", "d"], &[("a", "b"), ("b", "c"), ("c", "d")]).unwrap();
        for seed in 0..20 {
            let r = top_k_poset_select(&p, 2, seed).unwrap();
            assert_eq!(r.ids(), vec!["d", "c"]);
            assert!(r.selected.iter().all(|s| s.rationale == Rationale::Maximal));
        }
    }

    #[test]
    fn poset_top_k_antichain_takes_all() {
        let p = Poset::new::<&str>(&["a", "b", "c"], &[]).unwrap();
        let r = top_k_poset_select(&p, 3, 9).unwrap();
        assert_eq!(r.ids(), vec!["a", "b", "c"]);
        assert_eq!(r.rationale_counts(), BTreeMap::from([(Rationale::Maximal, 3)]));
        assert_eq!(top_k_poset_select(&p, 4, 0), Err(Error::KTooLarge { k: 4, n: 3 }));
    }

    #[test]
    fn poset_top_k_randomizes_second_slot() {
        let pool: Vec<(String, ScoreInterval<f64>)> = [("A", 82.0), ("B", 68.0), ("C", 67.0)]
            .iter()
            .map(|&(id, s)| (id.to_owned(), ScoreInterval::centered(s, 3.0).unwrap()))
            .collect();
        let p = build_poset(&pool).unwrap();
        let mut saw = BTreeMap::new();
        for seed in 0..200 {
            let r = top_k_poset_select(&p, 2, seed).unwrap();
            assert_eq!(r.selected[0], Selection { id: "A".into(), rationale: Rationale::Maximal });
            assert_eq!(r.selected[1].rationale, Rationale::RandomAmongMaximal);
            *saw.entry(r.selected[1].id.clone()).or_insert(0) += 1;
            assert_eq!(r, top_k_poset_select(&p, 2, seed).unwrap());
        }
        assert_eq!(saw.len(), 2);
    }
}
