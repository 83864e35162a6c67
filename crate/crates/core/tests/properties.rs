use proptest::prelude::*;

use ahp_rank::ahp::geometric_mean_weights;
use ahp_rank::analysis::{kendall_tau, perturb_one_judgment, rank, Method};
use ahp_rank::elicitation::{fuzzify_matrix, indicators_to_matrix, ElicitationRule, FuzzyScale, RuleKind};
use ahp_rank::fuzzy::{fuzzy_weights, FuzzyComparisonMatrix};
use ahp_rank::hierarchy::{Cohort, Direction};
use ahp_rank::{gci, priority_geometric_mean, ComparisonMatrix};

const GRADES: [f64; 17] = [
    1.0 / 9.0,
    1.0 / 8.0,
    1.0 / 7.0,
    1.0 / 6.0,
    1.0 / 5.0,
    1.0 / 4.0,
    1.0 / 3.0,
    1.0 / 2.0,
    1.0,
    2.0,
    3.0,
    4.0,
    5.0,
    6.0,
    7.0,
    8.0,
    9.0,
];

/// Random reciprocal matrix on the nine-point scale.
fn scale_matrix(sizes: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = ComparisonMatrix> {
    sizes.prop_flat_map(|n| {
        prop::collection::vec(0..GRADES.len(), n * (n - 1) / 2).prop_map(move |picks| {
            let mut it = picks.into_iter();
            ComparisonMatrix::from_upper(n, |_, _| GRADES[it.next().unwrap()]).unwrap()
        })
    })
}

fn shuffled(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn names(k: usize) -> Vec<String> {
    (0..k).map(|i| format!("a{i}")).collect()
}

proptest! {
    #[test]
    fn permutation_equivariance((m, perm) in scale_matrix(3..=8).prop_flat_map(|m| {
        let n = m.n();
        (Just(m), shuffled(n))
    })) {
        let w = geometric_mean_weights(&m);
        let p = m.permuted(&perm);
        let wp = geometric_mean_weights(&p);
        for (slot, &orig) in perm.iter().enumerate() {
            prop_assert!((wp[slot] - w[orig]).abs() < 1e-12);
        }
        prop_assert!((gci(&p, &wp) - gci(&m, &w)).abs() < 1e-12);
    }

    #[test]
    fn reciprocal_transpose_is_identity(m in scale_matrix(2..=8)) {
        let t = m.reciprocal_transpose();
        let (w, wt) = (geometric_mean_weights(&m), geometric_mean_weights(&t));
        for (a, b) in w.iter().zip(&wt) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn consistent_recovery(raw in prop::collection::vec(0.01f64..1.0, 3..=10)) {
        let total: f64 = raw.iter().sum();
        let w: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let p = priority_geometric_mean(&ComparisonMatrix::from_weights(&w).unwrap());
        for (a, b) in p.weights().iter().zip(&w) {
            prop_assert!((a - b).abs() < 1e-10);
        }
        prop_assert!(p.source_gci().unwrap() < 1e-12);
    }

    #[test]
    fn direct_ratio_scale_invariance(
        values in prop::collection::vec(0.5f64..500.0, 2..=7),
        c in 0.01f64..100.0,
    ) {
        let rule = ElicitationRule::new(RuleKind::DirectRatio);
        let a: Vec<Option<f64>> = values.iter().map(|v| Some(*v)).collect();
        let b: Vec<Option<f64>> = values.iter().map(|v| Some(v * c)).collect();
        let ma = indicators_to_matrix(&a, Direction::HigherIsBetter, &rule).unwrap().matrix;
        let mb = indicators_to_matrix(&b, Direction::HigherIsBetter, &rule).unwrap().matrix;
        for i in 0..ma.n() {
            for j in 0..ma.n() {
                prop_assert!((ma.get(i, j) - mb.get(i, j)).abs() <= 1e-9 * ma.get(i, j));
            }
        }
    }

    #[test]
    fn saaty_binning_scale_invariance(
        values in prop::collection::vec(0.0f64..100.0, 2..=7),
        shift in -6i32..=6,
    ) {
        let c = 2f64.powi(shift);
        let rule = ElicitationRule::new(RuleKind::SaatyDifference);
        let a: Vec<Option<f64>> = values.iter().map(|v| Some(*v)).collect();
        let b: Vec<Option<f64>> = values.iter().map(|v| Some(v * c)).collect();
        let ma = indicators_to_matrix(&a, Direction::HigherIsBetter, &rule);
        let mb = indicators_to_matrix(&b, Direction::HigherIsBetter, &rule);
        match (ma, mb) {
            (Ok(ma), Ok(mb)) => prop_assert_eq!(ma.matrix, mb.matrix),
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "scaling changed validity"),
        }
    }

    #[test]
    fn elicited_matrices_are_clipped_and_reciprocal(
        values in prop::collection::vec(prop::option::weighted(0.85, 0.0f64..1000.0), 2..=8),
        direction in prop_oneof![Just(Direction::HigherIsBetter), Just(Direction::LowerIsBetter)],
        kind in prop_oneof![Just(RuleKind::DirectRatio), Just(RuleKind::SaatyDifference)],
    ) {
        let rule = ElicitationRule::new(kind);
        if let Ok(e) = indicators_to_matrix(&values, direction, &rule) {
            let m = &e.matrix;
            prop_assert_eq!(m.n(), e.included.len());
            prop_assert!(m.reciprocity_error() <= 1e-9);
            for i in 0..m.n() {
                prop_assert_eq!(m.get(i, i), 1.0);
                for j in 0..m.n() {
                    prop_assert!(m.get(i, j) >= 1.0 / 9.0 - 1e-15 && m.get(i, j) <= 9.0);
                }
            }
        }
    }

    #[test]
    fn fuzzification_keeps_reciprocity(m in scale_matrix(2..=8)) {
        let f = fuzzify_matrix(&m, &FuzzyScale::standard()).unwrap();
        for i in 0..f.n() {
            for j in 0..f.n() {
                let t = f.get(i, j);
                prop_assert!(t.l() <= t.m() && t.m() <= t.u());
                prop_assert_eq!(f.get(j, i), t.recip());
                prop_assert_eq!(t.m(), m.get(i, j));
            }
        }
    }

    #[test]
    fn fuzzy_weights_are_ordered_and_track_crisp_mode(m in scale_matrix(2..=9)) {
        let f = fuzzify_matrix(&m, &FuzzyScale::standard()).unwrap();
        let w = fuzzy_weights(&f).unwrap();
        let crisp = geometric_mean_weights(&m);
        for (t, c) in w.fuzzy.iter().zip(&crisp) {
            prop_assert!(t.l() <= t.m() && t.m() <= t.u());
            prop_assert!((t.m() - c).abs() < 1e-12);
        }
        let sum: f64 = w.normalized.iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_fuzzy_matches_crisp(m in scale_matrix(1..=9)) {
        let w = fuzzy_weights(&FuzzyComparisonMatrix::degenerate(&m)).unwrap();
        for (a, b) in w.normalized.iter().zip(geometric_mean_weights(&m)) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn perturbation_touches_one_pair(
        (m, i, j) in scale_matrix(3..=8).prop_flat_map(|m| {
            let n = m.n();
            (Just(m), 0..n, 0..n)
        }),
        factor in 0.1f64..10.0,
    ) {
        prop_assume!(i != j);
        let p = perturb_one_judgment(&m, i, j, factor).unwrap();
        prop_assert!(p.reciprocity_error() <= 1e-9);
        let expected = (m.get(i, j) * factor).clamp(1.0 / 9.0, 9.0);
        prop_assert!((p.get(i, j) - expected).abs() <= 1e-12 * expected);
        for r in 0..m.n() {
            for c in 0..m.n() {
                if (r, c) != (i, j) && (r, c) != (j, i) {
                    prop_assert_eq!(p.get(r, c), m.get(r, c));
                }
            }
        }
    }

    #[test]
    fn tau_is_symmetric_and_bounded(
        a in prop::collection::vec(0u8..4, 2..=7),
        b in prop::collection::vec(0u8..4, 2..=7),
    ) {
        let k = a.len().min(b.len());
        let ids = names(k);
        let sa: Vec<f64> = a[..k].iter().map(|&x| x as f64).collect();
        let sb: Vec<f64> = b[..k].iter().map(|&x| x as f64).collect();
        let ra = rank(&ids, &sa, Method::Ahp, Cohort::None);
        let rb = rank(&ids, &sb, Method::Fahp, Cohort::None);
        let ab = kendall_tau(&ra, &rb).unwrap();
        let ba = kendall_tau(&rb, &ra).unwrap();
        prop_assert_eq!(ab, ba);
        prop_assert!((-1.0..=1.0).contains(&ab));
        if ra.entries.iter().all(|e| !e.tied) {
            prop_assert_eq!(kendall_tau(&ra, &ra).unwrap(), 1.0);
        }
    }

    #[test]
    fn ranking_is_deterministic_and_ordered(
        scores in prop::collection::vec(prop_oneof![Just(0.25f64), 0.0f64..1.0], 2..=8),
    ) {
        let ids = names(scores.len());
        let r1 = rank(&ids, &scores, Method::Ahp, Cohort::None);
        let r2 = rank(&ids, &scores, Method::Ahp, Cohort::None);
        prop_assert_eq!(&r1, &r2);
        for pair in r1.entries.windows(2) {
            prop_assert!(pair[0].score >= pair[1].score);
            prop_assert!(pair[0].rank <= pair[1].rank);
        }
        prop_assert_eq!(r1.entries[0].rank, 1);
    }
}
