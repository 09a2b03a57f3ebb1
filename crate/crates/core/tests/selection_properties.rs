use std::collections::{BTreeMap, BTreeSet};

use poset_screen::construct::build_intervals_count_based;
use poset_screen::{
    apply_floor, audit_selection, build_poset, cutoff_select_intervals, cutoff_select_raw,
    decay_length, four_fifths_check, four_fifths_from_counts, top_k_poset_select,
    utilitarian_top_k, GroupRate, GroupStats, Interval, LengthMode, ScoreInterval,
};
use proptest::prelude::*;

fn pool() -> impl Strategy<Value = Vec<(String, Interval)>> {
    proptest::collection::vec((-30i32..30, 0i32..10), 1..14).prop_map(|v| {
        v.into_iter()
            .enumerate()
            .map(|(i, (lo, w))| {
                (format!("c{i:02}"), ScoreInterval::new(lo as f64, (lo + w) as f64).unwrap())
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn top_k_never_skips_a_dominator(pool in pool(), k_frac in 0.0f64..=1.0, seed in any::<u64>()) {
        let p = build_poset(&pool).unwrap();
        let k = (k_frac * p.len() as f64).round() as usize;
        let res = top_k_poset_select(&p, k, seed).unwrap();
        prop_assert_eq!(res.len(), k);
        for (a, _) in &pool {
            for (b, _) in &pool {
                if p.dominates(b, a).unwrap() && res.contains(a) {
                    prop_assert!(res.contains(b), "{} selected over dominating {}", a, b);
                }
            }
        }
        prop_assert_eq!(&res, &top_k_poset_select(&p, k, seed).unwrap());
    }

    #[test]
    fn degenerate_top_k_is_utilitarian(
        scores in proptest::collection::btree_set(-1000i32..1000, 1..15),
        k_frac in 0.0f64..=1.0,
        seed in any::<u64>(),
    ) {
        let scores: BTreeMap<String, f64> = scores
            .into_iter()
            .enumerate()
            .map(|(i, s)| (format!("c{i:02}"), s as f64))
            .collect();
        let pool: Vec<(String, Interval)> =
            scores.iter().map(|(id, &s)| (id.clone(), ScoreInterval::point(s).unwrap())).collect();
        let k = (k_frac * scores.len() as f64).round() as usize;
        let poset = top_k_poset_select(&build_poset(&pool).unwrap(), k, seed).unwrap();
        let util = utilitarian_top_k(&scores, k).unwrap();
        let a: BTreeSet<&str> = poset.ids().into_iter().collect();
        let b: BTreeSet<&str> = util.ids().into_iter().collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn interval_cutoff_contains_raw_cutoff(pool in pool(), cutoff in -30.0f64..40.0) {
        let intervals: BTreeMap<String, Interval> = pool.into_iter().collect();
        let mids: BTreeMap<String, f64> =
            intervals.iter().map(|(id, iv)| (id.clone(), iv.midpoint())).collect();
        let raw = cutoff_select_raw(&mids, cutoff);
        let wide = cutoff_select_intervals(&intervals, cutoff);
        for id in raw.ids() {
            prop_assert!(wide.contains(id));
        }
    }

    #[test]
    fn floor_never_shrinks(lo in -50.0f64..50.0, w in 0.0f64..10.0, floor in 0.0f64..20.0) {
        let iv = ScoreInterval::new(lo, lo + w).unwrap();
        let out = apply_floor(iv, floor).unwrap();
        prop_assert!(out.length() >= iv.length() - 1e-12);
        prop_assert!(out.length() >= floor - 1e-12);
        prop_assert!(out.low() <= iv.low() && out.high() >= iv.high());
        prop_assert!((out.midpoint() - iv.midpoint()).abs() < 1e-9);
    }

    #[test]
    fn decay_shrinks_with_more_data(n in 1usize..10_000, c in 0.01f64..100.0) {
        prop_assert!(decay_length(n + 1, c).unwrap() <= decay_length(n, c).unwrap());
    }

    #[test]
    fn uniform_min_is_never_wider(
        sizes in proptest::collection::vec(1usize..500, 1..4),
        c in 0.1f64..20.0,
    ) {
        let mut stats = GroupStats::new();
        let mut scores = BTreeMap::new();
        let mut groups = BTreeMap::new();
        for (g, &n) in sizes.iter().enumerate() {
            stats = stats.with(format!("g{g}"), n, 50.0, 10.0).unwrap();
            scores.insert(format!("id{g}"), 50.0);
            groups.insert(format!("id{g}"), format!("g{g}"));
        }
        let per = build_intervals_count_based(&scores, &groups, &stats, c, LengthMode::PerGroup, 0.0).unwrap();
        let uni = build_intervals_count_based(&scores, &groups, &stats, c, LengthMode::UniformMin, 0.0).unwrap();
        for id in scores.keys() {
            prop_assert!(uni[id].length() <= per[id].length() + 1e-12);
        }
    }

    #[test]
    fn four_fifths_is_scale_invariant(
        a in 1u32..100, b in 1u32..100, scale in 0.01f64..100.0,
    ) {
        let r1 = BTreeMap::from([("x".to_owned(), Some(a as f64 / 100.0)), ("y".to_owned(), Some(b as f64 / 100.0))]);
        let r2 = BTreeMap::from([
            ("x".to_owned(), Some(a as f64 / 100.0 * scale)),
            ("y".to_owned(), Some(b as f64 / 100.0 * scale)),
        ]);
        let f1 = four_fifths_check(&r1).unwrap();
        let f2 = four_fifths_check(&r2).unwrap();
        prop_assert!((f1.ratio - f2.ratio).abs() < 1e-9);
    }

    #[test]
    fn count_screen_agrees_with_rate_screen(
        pa in 1usize..60, sa in 0usize..60, pb in 1usize..60, sb in 0usize..60,
    ) {
        let (sa, sb) = (sa.min(pa), sb.min(pb));
        let rates = BTreeMap::from([
            ("a".to_owned(), GroupRate::from_counts(pa, sa)),
            ("b".to_owned(), GroupRate::from_counts(pb, sb)),
        ]);
        let exact = four_fifths_from_counts(&rates).unwrap();
        let float = four_fifths_check(&rates.iter().map(|(g, r)| (g.clone(), r.rate)).collect()).unwrap();
        prop_assert_eq!(exact.pass, float.pass);
        prop_assert!((exact.ratio - float.ratio).abs() < 1e-12);
    }
}

#[test]
fn audit_recomputes_from_counts() {
    let groups: BTreeMap<String, String> = (0..10)
        .map(|i| (format!("c{i}"), if i < 6 { "a" } else { "b" }.to_owned()))
        .collect();
    let scores: BTreeMap<String, f64> = (0..10).map(|i| (format!("c{i}"), i as f64)).collect();
    let selected = cutoff_select_raw(&scores, 4.0);
    let report = audit_selection(&groups, &selected, serde_json::Value::Null).unwrap();
    assert!(report.is_consistent());
    assert_eq!(report.per_group["a"].selected, 2);
    assert_eq!(report.per_group["b"].selected, 4);
}
