//! Small hand-built pools used by the tests, the CLI `scenario` command and
//! the README walkthrough.
//!
//! The cutoff scenarios share one layout: two groups, where `group-2` has the
//! wider intervals (half-width 1.0 against 0.75), and a cutoff of 2.3. They
//! differ in which candidates fall into which group. `group-2` has the lower
//! sample mean in every scenario except the bimodal `majority_gain`.

use serde::{Deserialize, Serialize};

use crate::audit::ScenarioMember;
use crate::order::{AttributeSet, ConfidenceRegion, ScoreInterval, Vocabulary};

/// Three candidates scored 82, 68 and 67.
pub fn three_candidate_scores() -> Vec<(String, f64)> {
    vec![("A".into(), 82.0), ("B".into(), 68.0), ("C".into(), 67.0)]
}

/// The same three candidates with scores accurate to three points.
pub fn three_candidate_intervals() -> Vec<(String, ScoreInterval<f64>)> {
    three_candidate_scores()
        .into_iter()
        .map(|(id, s)| (id, ScoreInterval::centered(s, 3.0).expect("valid")))
        .collect()
}

/// Max, Adam and Trisha: a wide range, a narrow range inside it, and a
/// range clear above both.
pub fn score_range_trio() -> Vec<(String, ScoreInterval<f64>)> {
    [("Max", 80.0, 90.0), ("Adam", 85.0, 87.0), ("Trisha", 92.0, 95.0)]
        .iter()
        .map(|&(id, lo, hi)| (id.to_owned(), ScoreInterval::new(lo, hi).expect("valid")))
        .collect()
}

/// Industry experience, an MBA, or both.
pub fn qualification_sets() -> Vec<(String, AttributeSet)> {
    let vocab = Vocabulary::new(["industry", "MBA"]);
    vec![
        ("A".into(), AttributeSet::new(["industry"], &vocab).expect("in vocabulary")),
        ("B".into(), AttributeSet::new(["industry", "MBA"], &vocab).expect("in vocabulary")),
        ("C".into(), AttributeSet::new(["MBA"], &vocab).expect("in vocabulary")),
    ]
}

/// Half-extents of the bounding box of an ellipse rotated by `degrees`.
fn ellipse_half_extents(rx: f64, ry: f64, degrees: f64) -> (f64, f64) {
    let (s, c) = degrees.to_radians().sin_cos();
    (
        ((rx * c).powi(2) + (ry * s).powi(2)).sqrt(),
        ((rx * s).powi(2) + (ry * c).powi(2)).sqrt(),
    )
}

// Plot units to attribute units: work experience (years), GPA.
const EXPERIENCE_PER_UNIT: f64 = 2.0 / 0.9;
const GPA_PER_UNIT: f64 = 0.7 / 0.9;

fn region(cx: f64, cy: f64, rx: f64, ry: f64, degrees: f64) -> ConfidenceRegion<f64> {
    let (hx, hy) = ellipse_half_extents(rx, ry, degrees);
    ConfidenceRegion::from_bounds(&[
        ((cx - hx) * EXPERIENCE_PER_UNIT, (cx + hx) * EXPERIENCE_PER_UNIT),
        ((cy - hy) * GPA_PER_UNIT, (cy + hy) * GPA_PER_UNIT),
    ])
    .expect("valid box")
}

/// Five candidates scored on work experience and GPA, each with an
/// elliptical confidence region reduced to its bounding box. Groups are
/// `blue` (1, 2), `green` (3, 4) and `pink` (5).
pub fn two_attribute_pool() -> Vec<(String, String, ConfidenceRegion<f64>)> {
    vec![
        ("1".into(), "blue".into(), region(3.0, 4.4, 0.5, 0.5, 45.0)),
        ("2".into(), "blue".into(), region(4.0, 3.8, 0.5, 0.5, 45.0)),
        ("3".into(), "green".into(), region(1.5, 2.9, 1.1, 0.6, 45.0)),
        ("4".into(), "green".into(), region(3.7, 2.6, 0.9, 0.9, 45.0)),
        ("5".into(), "pink".into(), region(1.0, 1.0, 0.9, 0.4, 20.0)),
    ]
}

/// Raw (center) points of [`two_attribute_pool`].
pub fn two_attribute_centers() -> Vec<(String, Vec<f64>)> {
    two_attribute_pool()
        .into_iter()
        .map(|(id, _, r)| (id, r.center()))
        .collect()
}

/// Per-attribute cutoffs for [`two_attribute_pool`].
pub fn two_attribute_cutoffs() -> Vec<f64> {
    vec![2.0 * EXPERIENCE_PER_UNIT, 3.0 * GPA_PER_UNIT]
}

pub const SCENARIO_CUTOFF: f64 = 2.3;
pub const GROUP_1_HALF_WIDTH: f64 = 0.75;
pub const GROUP_2_HALF_WIDTH: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffScenario {
    pub name: String,
    pub description: String,
    pub cutoff: f64,
    pub members: Vec<ScenarioMember<f64>>,
}

fn scenario(name: &str, description: &str, group_1: &[f64], group_2: &[f64]) -> CutoffScenario {
    let mut members = Vec::new();
    for (label, centers, half) in [
        ("group-1", group_1, GROUP_1_HALF_WIDTH),
        ("group-2", group_2, GROUP_2_HALF_WIDTH),
    ] {
        for (i, &c) in centers.iter().enumerate() {
            members.push(ScenarioMember::new(
                format!("{label}-{i:02}"),
                label,
                ScoreInterval::centered(c, half).expect("valid"),
            ));
        }
    }
    CutoffScenario {
        name: name.to_owned(),
        description: description.to_owned(),
        cutoff: SCENARIO_CUTOFF,
        members,
    }
}

/// Unimodal scores; intervals let the best `group-2` candidate through.
pub fn minority_gain() -> CutoffScenario {
    scenario(
        "minority-gain",
        "interval cutoff adds the top candidate of the lower-mean group",
        &[3.0, 2.5, -2.3, -2.8, 1.8, 1.0, 0.7, 0.0, -1.6, -3.1, 0.0],
        &[2.1, -0.6, -0.8, -2.0],
    )
}

/// `group-2` holds the top raw scores; intervals add `group-1` candidates.
pub fn majority_gain() -> CutoffScenario {
    scenario(
        "majority-gain",
        "interval cutoff adds only majority-group candidates",
        &[2.1, 1.8, 1.0, 0.7, 0.0, -0.6, -0.8, -1.6, -2.0, -3.1, 0.0],
        &[3.0, 2.5, -2.3, -2.8],
    )
}

/// Groups far apart; no `group-2` interval reaches the cutoff.
pub fn separated() -> CutoffScenario {
    scenario(
        "separated",
        "interval cutoff adds only higher-mean-group candidates",
        &[3.0, 2.5, 2.1, 1.8, 0.7, 0.0, -0.6, -0.8, -2.0, -3.1, 0.0],
        &[-2.3, -2.8, 1.0, -1.6],
    )
}

/// Equal group sizes; raw selection is balanced, intervals unbalance it.
pub fn parity_loss() -> CutoffScenario {
    scenario(
        "parity-loss",
        "interval cutoff moves an equal-size slate away from parity",
        &[2.5, 2.1, 1.8, 1.0, 0.0, -1.6, -2.0, 0.0],
        &[3.0, -2.3, -2.8, 0.7, -0.6, -0.8, -3.1, -2.2],
    )
}

pub fn cutoff_scenarios() -> Vec<CutoffScenario> {
    vec![minority_gain(), majority_gain(), separated(), parity_loss()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_box_is_radius() {
        let (hx, hy) = ellipse_half_extents(0.5, 0.5, 45.0);
        assert!((hx - 0.5).abs() < 1e-12 && (hy - 0.5).abs() < 1e-12);
        let (hx, hy) = ellipse_half_extents(2.0, 1.0, 0.0);
        assert!((hx - 2.0).abs() < 1e-12 && (hy - 1.0).abs() < 1e-12);
    }

    #[test]
    fn experience_bounds_match_reading() {
        let pool = two_attribute_pool();
        let best_of_5 = pool[4].2.intervals()[0].high();
        let worst_of_1 = pool[0].2.intervals()[0].low();
        assert!((best_of_5 - 4.0).abs() < 0.2, "{best_of_5}");
        assert!((worst_of_1 - 5.5).abs() < 0.1, "{worst_of_1}");
    }

    #[test]
    fn scenarios_have_lower_mean_group_2() {
        for s in [minority_gain(), separated(), parity_loss()] {
            let mean = |g: &str| {
                let xs: Vec<f64> = s
                    .members
                    .iter()
                    .filter(|m| m.group == g)
                    .map(|m| m.interval.midpoint())
                    .collect();
                xs.iter().sum::<f64>() / xs.len() as f64
            };
            assert!(mean("group-2") < mean("group-1"), "{}", s.name);
        }
    }
}
