//! Strict partial orders over candidate ids.
//!
//! A [`Poset`] stores strict dominance as a DAG whose edge `(a, b)` means
//! "`b` is ranked strictly above `a`". Reflexive pairs are implicit. The
//! order itself is reachability in the stored edge set, so both the full
//! comparability graph produced by [`build_poset`] and its Hasse diagram
//! describe the same poset.
//!
//! Construction compares every pair, which is quadratic in the pool size.
//! Reachability is computed once per poset as one bitset per element and
//! cached.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::order::{Comparison, Dominance};

/// Unvalidated relation, as read from a file or assembled by hand.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DominanceRelation {
    pub elements: Vec<String>,
    /// `(a, b)`: `b` strictly above `a`.
    pub pairs: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    DuplicateElement { id: String },
    UnknownElement { id: String },
    Irreflexivity { id: String },
    Antisymmetry { a: String, b: String },
    /// Elements on a directed cycle of length three or more.
    Acyclicity { members: Vec<String> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateElement { id } => write!(f, "element `{id}` listed twice"),
            Violation::UnknownElement { id } => write!(f, "pair mentions unknown element `{id}`"),
            Violation::Irreflexivity { id } => write!(f, "`{id}` is ranked above itself"),
            Violation::Antisymmetry { a, b } => {
                write!(f, "`{a}` and `{b}` are each ranked above the other")
            }
            Violation::Acyclicity { members } => write!(f, "cycle through {members:?}"),
        }
    }
}

/// Axiom violations found in a relation; empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join("; "))
    }
}

/// Checks irreflexivity, antisymmetry and acyclicity of a raw relation.
pub fn validate_poset(rel: &DominanceRelation) -> ValidationReport {
    let mut violations = Vec::new();
    let mut index = BTreeMap::new();
    let mut names: Vec<&str> = Vec::new();
    for id in &rel.elements {
        if index.contains_key(id.as_str()) {
            violations.push(Violation::DuplicateElement { id: id.clone() });
        } else {
            index.insert(id.as_str(), names.len());
            names.push(id);
        }
    }

    let mut pairs = BTreeSet::new();
    for (a, b) in &rel.pairs {
        let mut known = true;
        for id in [a, b] {
            if !index.contains_key(id.as_str()) {
                violations.push(Violation::UnknownElement { id: id.clone() });
                known = false;
            }
        }
        if !known {
            continue;
        }
        if a == b {
            violations.push(Violation::Irreflexivity { id: a.clone() });
        } else {
            pairs.insert((index[a.as_str()], index[b.as_str()]));
        }
    }

    let mut mutual = BTreeSet::new();
    for &(a, b) in &pairs {
        if a < b && pairs.contains(&(b, a)) {
            mutual.insert((a, b));
            mutual.insert((b, a));
            violations.push(Violation::Antisymmetry {
                a: names[a].to_owned(),
                b: names[b].to_owned(),
            });
        }
    }

    // Longer cycles: whatever Kahn's algorithm cannot peel once the
    // two-cycles above are set aside.
    let n = index.len();
    let edges: Vec<(usize, usize)> = pairs.difference(&mutual).copied().collect();
    if topological_order(n, &edges).is_none() {
        let remaining = unpeeled(n, &edges);
        let mut members: Vec<String> = remaining.iter().map(|&i| names[i].to_owned()).collect();
        members.sort();
        violations.push(Violation::Acyclicity { members });
    }

    ValidationReport { violations }
}

fn successor_lists(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut succ = vec![Vec::new(); n];
    for &(a, b) in edges {
        succ[a].push(b);
    }
    for s in &mut succ {
        s.sort_unstable();
        s.dedup();
    }
    succ
}

fn kahn(n: usize, edges: &[(usize, usize)]) -> (Vec<usize>, Vec<usize>) {
    let succ = successor_lists(n, edges);
    let mut indegree = vec![0usize; n];
    for s in &succ {
        for &b in s {
            indegree[b] += 1;
        }
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &v in &succ[u] {
            indegree[v] -= 1;
            if indegree[v] == 0 {
                queue.push_back(v);
            }
        }
    }
    let left = (0..n).filter(|&i| indegree[i] > 0).collect();
    (order, left)
}

fn topological_order(n: usize, edges: &[(usize, usize)]) -> Option<Vec<usize>> {
    let (order, left) = kahn(n, edges);
    left.is_empty().then_some(order)
}

/// Elements on a cycle (or on a path between cycles): peel sources forward,
/// then peel sinks among what is left.
fn unpeeled(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let forward: BTreeSet<usize> = kahn(n, edges).1.into_iter().collect();
    let reversed: Vec<(usize, usize)> = edges
        .iter()
        .filter(|(a, b)| forward.contains(a) && forward.contains(b))
        .map(|&(a, b)| (b, a))
        .collect();
    kahn(n, &reversed)
        .1
        .into_iter()
        .filter(|i| forward.contains(i))
        .collect()
}

/// Validated strict partial order over candidate ids.
#[derive(Debug, Clone)]
pub struct Poset {
    ids: Vec<String>,
    index: BTreeMap<String, usize>,
    edges: BTreeSet<(usize, usize)>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
    topo: Vec<usize>,
    above: OnceLock<Vec<FixedBitSet>>,
}

impl PartialEq for Poset {
    fn eq(&self, other: &Self) -> bool {
        self.ids == other.ids && self.edges == other.edges
    }
}

impl Eq for Poset {}

impl Poset {
    /// Builds a poset from ids and `(lower, upper)` pairs, rejecting any
    /// relation that fails [`validate_poset`].
    pub fn new<S: AsRef<str>>(elements: &[S], pairs: &[(S, S)]) -> Result<Self> {
        let rel = DominanceRelation {
            elements: elements.iter().map(|s| s.as_ref().to_owned()).collect(),
            pairs: pairs
                .iter()
                .map(|(a, b)| (a.as_ref().to_owned(), b.as_ref().to_owned()))
                .collect(),
        };
        Self::from_relation(&rel)
    }

    pub fn from_relation(rel: &DominanceRelation) -> Result<Self> {
        let report = validate_poset(rel);
        if !report.is_valid() {
            return Err(Error::InvalidPoset(report));
        }
        let mut ids = rel.elements.clone();
        ids.sort();
        let index: BTreeMap<String, usize> =
            ids.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();
        let edges = rel
            .pairs
            .iter()
            .map(|(a, b)| (index[a], index[b]))
            .collect();
        Ok(Self::from_indexed(ids, index, edges))
    }

    /// `ids` must be sorted and unique, `edges` acyclic.
    fn from_indexed(
        ids: Vec<String>,
        index: BTreeMap<String, usize>,
        edges: BTreeSet<(usize, usize)>,
    ) -> Self {
        let n = ids.len();
        let list: Vec<(usize, usize)> = edges.iter().copied().collect();
        let succ = successor_lists(n, &list);
        let mut pred = vec![Vec::new(); n];
        for &(a, b) in &list {
            pred[b].push(a);
        }
        let topo = topological_order(n, &list).expect("validated relation is acyclic");
        Self {
            ids,
            index,
            edges,
            succ,
            pred,
            topo,
            above: OnceLock::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Element ids in sorted order.
    pub fn elements(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn id(&self, idx: usize) -> &str {
        &self.ids[idx]
    }

    /// Stored `(lower, upper)` edges, sorted by index.
    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.edges
            .iter()
            .map(|&(a, b)| (self.ids[a].as_str(), self.ids[b].as_str()))
    }

    pub fn edge_indices(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, lower: &str, upper: &str) -> bool {
        match (self.index_of(lower), self.index_of(upper)) {
            (Some(a), Some(b)) => self.edges.contains(&(a, b)),
            _ => false,
        }
    }

    /// Elements stored directly above `idx`.
    pub fn successors(&self, idx: usize) -> &[usize] {
        &self.succ[idx]
    }

    /// Elements stored directly below `idx`.
    pub fn predecessors(&self, idx: usize) -> &[usize] {
        &self.pred[idx]
    }

    fn above_sets(&self) -> &[FixedBitSet] {
        self.above.get_or_init(|| {
            let n = self.ids.len();
            let mut above = vec![FixedBitSet::with_capacity(n); n];
            for &u in self.topo.iter().rev() {
                let mut set = FixedBitSet::with_capacity(n);
                for &v in &self.succ[u] {
                    set.insert(v);
                    set.union_with(&above[v]);
                }
                above[u] = set;
            }
            above
        })
    }

    /// Indices strictly above `idx` in the order.
    pub fn strictly_above(&self, idx: usize) -> &FixedBitSet {
        &self.above_sets()[idx]
    }

    /// `true` when `upper` is strictly above `lower` in the order.
    pub fn dominates_idx(&self, upper: usize, lower: usize) -> bool {
        self.above_sets()[lower].contains(upper)
    }

    pub fn dominates(&self, upper: &str, lower: &str) -> Result<bool> {
        let u = self.require(upper)?;
        let l = self.require(lower)?;
        Ok(self.dominates_idx(u, l))
    }

    pub fn compare(&self, a: &str, b: &str) -> Result<Comparison> {
        let ia = self.require(a)?;
        let ib = self.require(b)?;
        Ok(if self.dominates_idx(ia, ib) {
            Comparison::Above
        } else if self.dominates_idx(ib, ia) {
            Comparison::Below
        } else {
            Comparison::Incomparable
        })
    }

    fn require(&self, id: &str) -> Result<usize> {
        self.index_of(id).ok_or_else(|| Error::UnknownId(id.to_owned()))
    }

    /// Ids not dominated by any other element, in sorted order.
    pub fn maximal_elements(&self) -> Vec<String> {
        (0..self.len())
            .filter(|&i| self.succ[i].is_empty())
            .map(|i| self.ids[i].clone())
            .collect()
    }

    /// Minimal edge set with the same reachability (the Hasse diagram).
    pub fn transitive_reduction(&self) -> Poset {
        let above = self.above_sets();
        let n = self.len();
        let mut kept = BTreeSet::new();
        for u in 0..n {
            let mut via_longer = FixedBitSet::with_capacity(n);
            for &w in &self.succ[u] {
                via_longer.union_with(&above[w]);
            }
            for &v in &self.succ[u] {
                if !via_longer.contains(v) {
                    kept.insert((u, v));
                }
            }
        }
        Self::from_indexed(self.ids.clone(), self.index.clone(), kept)
    }

    /// Every comparable pair as an explicit edge.
    pub fn transitive_closure(&self) -> Poset {
        let above = self.above_sets();
        let edges = (0..self.len())
            .flat_map(|u| above[u].ones().map(move |v| (u, v)))
            .collect();
        Self::from_indexed(self.ids.clone(), self.index.clone(), edges)
    }

    /// Sub-poset on `keep`, with the order inherited by reachability.
    pub fn restrict(&self, keep: &[usize]) -> Poset {
        let above = self.above_sets();
        let mut keep: Vec<usize> = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let ids: Vec<String> = keep.iter().map(|&i| self.ids[i].clone()).collect();
        let index = ids.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();
        let mut edges = BTreeSet::new();
        for (new_a, &a) in keep.iter().enumerate() {
            for (new_b, &b) in keep.iter().enumerate() {
                if above[a].contains(b) {
                    edges.insert((new_a, new_b));
                }
            }
        }
        Self::from_indexed(ids, index, edges).transitive_reduction()
    }

    pub fn to_relation(&self) -> DominanceRelation {
        DominanceRelation {
            elements: self.ids.clone(),
            pairs: self
                .edges()
                .map(|(a, b)| (a.to_owned(), b.to_owned()))
                .collect(),
        }
    }
}

/// Free-function form of [`Poset::transitive_reduction`].
pub fn transitive_reduction(p: &Poset) -> Poset {
    p.transitive_reduction()
}

/// Validates a raw relation and returns its Hasse diagram.
pub fn hasse_from_relation(rel: &DominanceRelation) -> Result<Poset> {
    Ok(Poset::from_relation(rel)?.transitive_reduction())
}

pub fn maximal_elements(p: &Poset) -> Vec<String> {
    p.maximal_elements()
}

/// Compares every pair in `pool` and records each strict dominance.
///
/// The result holds every comparable pair (it is transitively closed
/// whenever the evidence comparison is transitive) and does not depend on
/// the order of `pool`.
pub fn build_poset<K: Dominance>(pool: &[(String, K)]) -> Result<Poset> {
    let mut order: Vec<usize> = (0..pool.len()).collect();
    order.sort_by(|&a, &b| pool[a].0.cmp(&pool[b].0));
    for w in order.windows(2) {
        if pool[w[0]].0 == pool[w[1]].0 {
            return Err(Error::DuplicateId(pool[w[0]].0.clone()));
        }
    }
    if pool.iter().any(|(id, _)| id.is_empty()) {
        return Err(Error::EmptyId);
    }

    let ids: Vec<String> = order.iter().map(|&i| pool[i].0.clone()).collect();
    let index = ids.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();
    let mut edges = BTreeSet::new();
    for a in 0..order.len() {
        for b in (a + 1)..order.len() {
            match pool[order[a]].1.compare(&pool[order[b]].1)? {
                Comparison::Above => {
                    edges.insert((b, a));
                }
                Comparison::Below => {
                    edges.insert((a, b));
                }
                Comparison::Incomparable => {}
            }
        }
    }
    let list: Vec<(usize, usize)> = edges.iter().copied().collect();
    if topological_order(ids.len(), &list).is_none() {
        // Only reachable with a non-transitive custom comparison.
        let rel = DominanceRelation {
            elements: ids.clone(),
            pairs: list
                .iter()
                .map(|&(a, b)| (ids[a].clone(), ids[b].clone()))
                .collect(),
        };
        return Err(Error::InvalidPoset(validate_poset(&rel)));
    }
    Ok(Poset::from_indexed(ids, index, edges))
}
