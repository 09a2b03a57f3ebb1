//! Outcome audits: per-group selection rates, the four-fifths screen,
//! workforce composition tables, and raw-versus-interval cutoff comparisons.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::order::ScoreInterval;
use crate::scalar::Scalar;
use crate::selection::{cutoff_select_intervals, cutoff_select_raw, Rationale, SelectionResult};

/// Lowest acceptable ratio of the smallest to the largest group rate.
/// A ratio exactly at the threshold passes.
pub const FOUR_FIFTHS_THRESHOLD: f64 = 0.8;

/// Slack for rates that arrive as floats rather than counts.
const RATE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupRate {
    pub pool: usize,
    pub selected: usize,
    /// `None` when the group has no pool members.
    pub rate: Option<f64>,
}

impl GroupRate {
    pub fn from_counts(pool: usize, selected: usize) -> Self {
        Self {
            pool,
            selected,
            rate: (pool > 0).then(|| selected as f64 / pool as f64),
        }
    }
}

pub type GroupRates = BTreeMap<String, GroupRate>;

/// Selection rate per group. `pool` maps candidate id to group label.
pub fn selection_rates(
    pool: &BTreeMap<String, String>,
    result: &SelectionResult,
) -> Result<GroupRates> {
    let mut pool_counts: BTreeMap<&str, usize> = BTreeMap::new();
    for group in pool.values() {
        *pool_counts.entry(group).or_insert(0) += 1;
    }
    let mut selected_counts: BTreeMap<&str, usize> = BTreeMap::new();
    for s in &result.selected {
        let group = pool
            .get(&s.id)
            .ok_or_else(|| Error::SelectedNotInPool(s.id.clone()))?;
        *selected_counts.entry(group).or_insert(0) += 1;
    }
    Ok(pool_counts
        .into_iter()
        .map(|(g, n)| {
            let sel = selected_counts.get(g).copied().unwrap_or(0);
            (g.to_owned(), GroupRate::from_counts(n, sel))
        })
        .collect())
}

/// Adds groups that are known to exist but have no pool members.
pub fn declare_groups<I, S>(rates: &mut GroupRates, labels: I)
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    for label in labels {
        rates
            .entry(label.into())
            .or_insert_with(|| GroupRate::from_counts(0, 0));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourFifths {
    pub ratio: f64,
    pub pass: bool,
}

/// Ratio of the smallest to the largest defined rate, and whether it meets
/// [`FOUR_FIFTHS_THRESHOLD`]. Undefined rates are skipped; all-zero rates
/// give a ratio of 1.
pub fn four_fifths_check(rates: &BTreeMap<String, Option<f64>>) -> Result<FourFifths> {
    let defined: Vec<f64> = rates.values().flatten().copied().collect();
    if defined.is_empty() {
        return Err(Error::NoDefinedRates);
    }
    let max = defined.iter().copied().fold(f64::MIN, f64::max);
    let min = defined.iter().copied().fold(f64::MAX, f64::min);
    let ratio = if max > 0.0 { min / max } else { 1.0 };
    Ok(FourFifths {
        ratio,
        pass: ratio >= FOUR_FIFTHS_THRESHOLD - RATE_TOLERANCE,
    })
}

fn rate_cmp(a: &GroupRate, b: &GroupRate) -> Ordering {
    (a.selected as u128 * b.pool as u128).cmp(&(b.selected as u128 * a.pool as u128))
}

/// Same screen computed exactly from counts.
pub fn four_fifths_from_counts(rates: &GroupRates) -> Result<FourFifths> {
    let defined: Vec<&GroupRate> = rates.values().filter(|r| r.pool > 0).collect();
    let (Some(min), Some(max)) = (
        defined.iter().copied().min_by(|a, b| rate_cmp(a, b)),
        defined.iter().copied().max_by(|a, b| rate_cmp(a, b)),
    ) else {
        return Err(Error::NoDefinedRates);
    };
    if max.selected == 0 {
        return Ok(FourFifths { ratio: 1.0, pass: true });
    }
    let ratio = (min.selected as f64 * max.pool as f64) / (max.selected as f64 * min.pool as f64);
    // min_rate / max_rate >= 4/5  <=>  5 * min_sel * max_pool >= 4 * max_sel * min_pool
    let pass = 5 * min.selected as u128 * max.pool as u128
        >= 4 * max.selected as u128 * min.pool as u128;
    Ok(FourFifths { ratio, pass })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub per_group: GroupRates,
    pub four_fifths_ratio: f64,
    pub four_fifths_pass: bool,
    /// Largest minus smallest defined rate.
    pub parity_gap: f64,
    pub rationale_summary: BTreeMap<Rationale, usize>,
    /// Parameters of the run that produced the selection.
    pub config_echo: serde_json::Value,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl AuditReport {
    /// Recomputes rates, ratio, pass flag and gap from the stored counts.
    pub fn is_consistent(&self) -> bool {
        let Ok(ff) = four_fifths_from_counts(&self.per_group) else {
            return false;
        };
        let rates_ok = self
            .per_group
            .values()
            .all(|r| r.rate == GroupRate::from_counts(r.pool, r.selected).rate);
        rates_ok
            && ff.pass == self.four_fifths_pass
            && ff.ratio == self.four_fifths_ratio
            && parity_gap(&self.per_group) == self.parity_gap
    }
}

fn parity_gap(rates: &GroupRates) -> f64 {
    let defined: Vec<f64> = rates.values().filter_map(|r| r.rate).collect();
    if defined.is_empty() {
        return 0.0;
    }
    let max = defined.iter().copied().fold(f64::MIN, f64::max);
    let min = defined.iter().copied().fold(f64::MAX, f64::min);
    max - min
}

/// Builds a full report for one selection over `pool` (id to group).
pub fn audit_selection(
    pool: &BTreeMap<String, String>,
    result: &SelectionResult,
    config_echo: serde_json::Value,
) -> Result<AuditReport> {
    let per_group = selection_rates(pool, result)?;
    let ff = four_fifths_from_counts(&per_group)?;
    Ok(AuditReport {
        parity_gap: parity_gap(&per_group),
        four_fifths_ratio: ff.ratio,
        four_fifths_pass: ff.pass,
        rationale_summary: result.rationale_counts(),
        per_group,
        config_echo,
        notes: vec![
            "four-fifths check passes at a ratio of exactly 0.8".to_owned(),
            "groups with no pool members are excluded from the ratio".to_owned(),
        ],
    })
}

/// Headcount by group and level, with marginals. `counts[g][l]` follows the
/// sorted order of `groups` and `levels` and doubles as a heat-map matrix.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositionTable {
    pub groups: Vec<String>,
    pub levels: Vec<String>,
    pub counts: Vec<Vec<usize>>,
    pub group_totals: Vec<usize>,
    pub level_totals: Vec<usize>,
    pub total: usize,
}

impl CompositionTable {
    pub fn get(&self, group: &str, level: &str) -> usize {
        let g = self.groups.iter().position(|x| x == group);
        let l = self.levels.iter().position(|x| x == level);
        match (g, l) {
            (Some(g), Some(l)) => self.counts[g][l],
            _ => 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }
}

/// Cross-tabulates `(group, level)` records.
pub fn composition_audit<G, L>(workforce: &[(G, L)]) -> CompositionTable
where
    G: AsRef<str>,
    L: AsRef<str>,
{
    let groups: Vec<String> = workforce
        .iter()
        .map(|(g, _)| g.as_ref().to_owned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let levels: Vec<String> = workforce
        .iter()
        .map(|(_, l)| l.as_ref().to_owned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut counts = vec![vec![0usize; levels.len()]; groups.len()];
    for (g, l) in workforce {
        let gi = groups.binary_search_by(|x| x.as_str().cmp(g.as_ref())).expect("collected");
        let li = levels.binary_search_by(|x| x.as_str().cmp(l.as_ref())).expect("collected");
        counts[gi][li] += 1;
    }
    let group_totals = counts.iter().map(|row| row.iter().sum()).collect();
    let level_totals = (0..levels.len())
        .map(|l| counts.iter().map(|row| row[l]).sum())
        .collect();
    CompositionTable {
        total: workforce.len(),
        groups,
        levels,
        counts,
        group_totals,
        level_totals,
    }
}

/// One pool member in a cutoff comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct ScenarioMember<T> {
    pub id: String,
    pub group: String,
    pub interval: ScoreInterval<T>,
}

impl<T: Scalar> ScenarioMember<T> {
    pub fn new(id: impl Into<String>, group: impl Into<String>, interval: ScoreInterval<T>) -> Self {
        Self { id: id.into(), group: group.into(), interval }
    }
}

/// Raw-score cutoff (on interval midpoints) against interval cutoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioComparison {
    pub cutoff: f64,
    pub raw_selection: SelectionResult,
    pub interval_selection: SelectionResult,
    pub raw: AuditReport,
    pub interval: AuditReport,
    /// Interval-selected minus raw-selected count, per group.
    pub delta: BTreeMap<String, i64>,
    /// Ids selected only under interval semantics.
    pub added: Vec<String>,
}

pub fn scenario_compare<T: Scalar>(
    pool: &[ScenarioMember<T>],
    cutoff: T,
) -> Result<ScenarioComparison> {
    let mut groups = BTreeMap::new();
    let mut midpoints = BTreeMap::new();
    let mut intervals = BTreeMap::new();
    for m in pool {
        if m.id.is_empty() {
            return Err(Error::EmptyId);
        }
        if groups.insert(m.id.clone(), m.group.clone()).is_some() {
            return Err(Error::DuplicateId(m.id.clone()));
        }
        midpoints.insert(m.id.clone(), m.interval.midpoint());
        intervals.insert(m.id.clone(), m.interval);
    }
    let raw_selection = cutoff_select_raw(&midpoints, cutoff);
    let interval_selection = cutoff_select_intervals(&intervals, cutoff);
    let echo = serde_json::json!({ "cutoff": cutoff.as_f64() });
    let raw = audit_selection(&groups, &raw_selection, echo.clone())?;
    let interval = audit_selection(&groups, &interval_selection, echo)?;
    let delta = interval
        .per_group
        .iter()
        .map(|(g, r)| (g.clone(), r.selected as i64 - raw.per_group[g].selected as i64))
        .collect();
    let added = interval_selection
        .ids()
        .into_iter()
        .filter(|id| !raw_selection.contains(id))
        .map(str::to_owned)
        .collect();
    Ok(ScenarioComparison {
        cutoff: cutoff.as_f64(),
        raw_selection,
        interval_selection,
        raw,
        interval,
        delta,
        added,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selection::Selection;

    fn pick(ids: &[&str]) -> SelectionResult {
        SelectionResult {
            selected: ids
                .iter()
                .map(|&id| Selection { id: id.into(), rationale: Rationale::Maximal })
                .collect(),
            seed: None,
        }
    }

    fn pool(items: &[(&str, &str)]) -> BTreeMap<String, String> {
        items.iter().map(|&(a, b)| (a.to_owned(), b.to_owned())).collect()
    }

    #[test]
    fn rate_examples() {
        let p = pool(&[("A", "g1"), ("B", "g1"), ("C", "g2")]);
        let r = selection_rates(&p, &pick(&["A", "C"])).unwrap();
        assert_eq!(r["g1"].rate, Some(0.5));
        assert_eq!(r["g2"].rate, Some(1.0));

        let none = selection_rates(&p, &pick(&[])).unwrap();
        assert!(none.values().all(|r| r.rate == Some(0.0)));

        let single = selection_rates(&pool(&[("A", "g")]), &pick(&["A"])).unwrap();
        assert_eq!(single.len(), 1);

        assert_eq!(
            selection_rates(&p, &pick(&["Z"])),
            Err(Error::SelectedNotInPool("Z".into()))
        );
    }

    #[test]
    fn four_fifths_examples() {
        let rates = |v: &[f64]| -> BTreeMap<String, Option<f64>> {
            v.iter().enumerate().map(|(i, &r)| (format!("g{i}"), Some(r))).collect()
        };
        let ff = four_fifths_check(&rates(&[0.5, 0.4])).unwrap();
        assert!((ff.ratio - 0.8).abs() < 1e-12 && ff.pass);
        let ff = four_fifths_check(&rates(&[0.5, 0.35])).unwrap();
        assert!((ff.ratio - 0.7).abs() < 1e-12 && !ff.pass);
        assert_eq!(
            four_fifths_check(&rates(&[0.3])).unwrap(),
            FourFifths { ratio: 1.0, pass: true }
        );
        assert_eq!(four_fifths_check(&rates(&[0.0, 0.0])).unwrap().ratio, 1.0);
        let undefined = BTreeMap::from([("g".to_owned(), None)]);
        assert_eq!(four_fifths_check(&undefined), Err(Error::NoDefinedRates));
    }

    #[test]
    fn counts_screen_is_exact_at_boundary() {
        let mut r = GroupRates::new();
        r.insert("a".into(), GroupRate::from_counts(10, 5));
        r.insert("b".into(), GroupRate::from_counts(10, 4));
        assert!(four_fifths_from_counts(&r).unwrap().pass);
        r.insert("b".into(), GroupRate::from_counts(100, 39));
        assert!(!four_fifths_from_counts(&r).unwrap().pass);
    }

    #[test]
    fn zero_pool_groups_are_excluded() {
        let p = pool(&[("A", "g1"), ("B", "g2")]);
        let mut r = selection_rates(&p, &pick(&["A", "B"])).unwrap();
        declare_groups(&mut r, ["g3"]);
        assert_eq!(r["g3"].rate, None);
        let ff = four_fifths_from_counts(&r).unwrap();
        assert!(ff.pass);
        assert_eq!(ff.ratio, 1.0);
    }

    #[test]
    fn report_is_consistent() {
        let p = pool(&[("A", "g1"), ("B", "g1"), ("C", "g2"), ("D", "g2"), ("E", "g2")]);
        let report = audit_selection(&p, &pick(&["A", "C"]), serde_json::json!({})).unwrap();
        assert!(report.is_consistent());
        assert!((report.parity_gap - (0.5 - 1.0 / 3.0)).abs() < 1e-12);
        assert!(!report.four_fifths_pass);
        assert_eq!(report.rationale_summary[&Rationale::Maximal], 2);
    }

    #[test]
    fn composition_examples() {
        assert!(composition_audit::<&str, &str>(&[]).is_empty());

        let one = composition_audit(&[("g", "L")]);
        assert_eq!(one.get("g", "L"), 1);
        assert_eq!(one.counts, vec![vec![1]]);

        let pyramid = [
            ("w", "exec"), ("w", "mgr"), ("w", "mgr"), ("w", "staff"), ("w", "staff"),
            ("w", "staff"), ("m", "exec"), ("m", "exec"), ("m", "mgr"), ("m", "staff"),
        ];
        let t = composition_audit(&pyramid);
        assert_eq!(t.total, 10);
        assert_eq!(t.group_totals.iter().sum::<usize>(), 10);
        assert_eq!(t.level_totals.iter().sum::<usize>(), 10);
        assert_eq!(t.get("m", "exec"), 2);
        assert_eq!(t.get("nobody", "exec"), 0);
    }

    #[test]
    fn degenerate_scenario_has_zero_delta() {
        let pool: Vec<ScenarioMember<f64>> = [("a", "g1", 3.0), ("b", "g2", 2.0), ("c", "g2", 1.0)]
            .iter()
            .map(|&(id, g, s)| ScenarioMember::new(id, g, ScoreInterval::point(s).unwrap()))
            .collect();
        let cmp = scenario_compare(&pool, 2.0).unwrap();
        assert!(cmp.delta.values().all(|&d| d == 0));
        assert!(cmp.added.is_empty());
        assert_eq!(cmp.raw_selection.ids(), cmp.interval_selection.ids());
    }
}
