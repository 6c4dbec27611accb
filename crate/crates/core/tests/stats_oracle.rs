mod common;

use common::*;
use nowcast::stats::{correlate, kendall_exact_p_value, rank_discrepancy, Method, Transform};
use proptest::prelude::*;

#[test]
fn kendall_matches_pair_enumeration() {
    let mut rng = SplitMix(11);
    for case in 0..400 {
        let n = 2 + (case % 11);
        let (x, y) = random_pair(&mut rng, n, case % 2 == 0);
        if is_constant(&x) || is_constant(&y) {
            continue;
        }
        let r = correlate(&x, &y, Method::Kendall, Transform::Raw).unwrap();
        let (tau, _) = brute_tau_b(&x, &y);
        assert!((r.coefficient - tau).abs() < 1e-12, "{x:?} {y:?}: {} vs {tau}", r.coefficient);
    }
}

#[test]
fn kendall_exact_p_matches_enumeration() {
    let mut rng = SplitMix(5);
    for case in 0..120 {
        let n = 2 + (case % 7);
        let (x, y) = random_pair(&mut rng, n, case % 3 != 0);
        if is_constant(&x) || is_constant(&y) {
            continue;
        }
        assert_eq!(kendall_exact_p_value(&x, &y), brute_kendall_exact_p(&x, &y), "{x:?} {y:?}");
    }
}

#[test]
fn spearman_and_pearson_match_definitions() {
    let mut rng = SplitMix(99);
    for case in 0..400 {
        let n = 2 + (case % 11);
        let (x, y) = random_pair(&mut rng, n, case % 2 == 1);
        if is_constant(&x) || is_constant(&y) {
            continue;
        }
        let s = correlate(&x, &y, Method::Spearman, Transform::Raw).unwrap();
        assert!((s.coefficient - brute_spearman(&x, &y)).abs() < 1e-12);
        let p = correlate(&x, &y, Method::Pearson, Transform::Raw).unwrap();
        assert!((p.coefficient - brute_pearson(&x, &y)).abs() < 1e-12);
    }
}

#[test]
fn county_fixture_per_capita_correlations() {
    // Oracle values (pair enumeration / mid-rank Pearson / log-Pearson on the
    // transcribed table) before comparing with the library.
    let act: Vec<f64> = COUNTY_TABLE.iter().map(|r| r.1 / r.0).collect();
    let ex_post: Vec<f64> = COUNTY_TABLE.iter().map(|r| r.3 / r.0).collect();
    let hazus: Vec<f64> = COUNTY_TABLE.iter().map(|r| r.4 / r.0).collect();
    for (damage, tau_oracle, rho_oracle) in [(&ex_post, 0.339_031_339, 0.504_884_005), (&hazus, 0.287_749_288, 0.445_054_945)] {
        let (tau, _) = brute_tau_b(&act, damage);
        assert!((tau - tau_oracle).abs() < 1e-8);
        assert!((brute_spearman(&act, damage) - rho_oracle).abs() < 1e-8);
        let k = correlate(&act, damage, Method::Kendall, Transform::Raw).unwrap();
        let s = correlate(&act, damage, Method::Spearman, Transform::Raw).unwrap();
        assert!((k.coefficient - tau).abs() < 1e-12);
        assert!((s.coefficient - rho_oracle).abs() < 1e-8);
    }
    let k = correlate(&act, &ex_post, Method::Kendall, Transform::Raw).unwrap();
    let s = correlate(&act, &ex_post, Method::Spearman, Transform::Raw).unwrap();
    // Reported P-values: 0.013 and 0.007.
    assert!((k.p_value - 0.013).abs() < 5e-4, "{}", k.p_value);
    assert!((s.p_value - 0.007).abs() < 5e-4, "{}", s.p_value);
}

fn arb_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (3usize..25).prop_flat_map(|n| {
        let v = || prop::collection::vec(prop_oneof![(-5i32..5).prop_map(f64::from), -100.0f64..100.0], n);
        (v(), v())
    })
}

fn usable(x: &[f64], y: &[f64]) -> bool {
    !is_constant(x) && !is_constant(y)
}

proptest! {
    #[test]
    fn symmetric_in_arguments((x, y) in arb_pair()) {
        prop_assume!(usable(&x, &y));
        for m in Method::ALL {
            let a = correlate(&x, &y, m, Transform::Raw).unwrap();
            let b = correlate(&y, &x, m, Transform::Raw).unwrap();
            prop_assert_eq!(a.coefficient, b.coefficient);
            prop_assert_eq!(a.p_value, b.p_value);
        }
    }

    #[test]
    fn rank_methods_invariant_under_monotone_maps((x, y) in arb_pair()) {
        prop_assume!(usable(&x, &y));
        let fx: Vec<f64> = x.iter().map(|v| v.powi(3) + 2.0 * v).collect();
        let fy: Vec<f64> = y.iter().map(|v| (v / 50.0).exp()).collect();
        for m in [Method::Kendall, Method::Spearman] {
            let a = correlate(&x, &y, m, Transform::Raw).unwrap();
            let b = correlate(&fx, &fy, m, Transform::Raw).unwrap();
            prop_assert_eq!(a.coefficient, b.coefficient);
        }
    }

    #[test]
    fn pearson_affine_invariant((x, y) in arb_pair(), a in 0.1f64..10.0, b in -50.0f64..50.0) {
        prop_assume!(usable(&x, &y));
        let ax: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let r0 = correlate(&x, &y, Method::Pearson, Transform::Raw).unwrap();
        let r1 = correlate(&ax, &y, Method::Pearson, Transform::Raw).unwrap();
        prop_assert!((r0.coefficient - r1.coefficient).abs() < 1e-9);
    }

    #[test]
    fn negation_flips_rank_coefficients((x, y) in arb_pair()) {
        prop_assume!(usable(&x, &y));
        let ny: Vec<f64> = y.iter().map(|v| -v).collect();
        for m in [Method::Kendall, Method::Spearman] {
            let a = correlate(&x, &y, m, Transform::Raw).unwrap();
            let b = correlate(&x, &ny, m, Transform::Raw).unwrap();
            prop_assert_eq!(a.coefficient, -b.coefficient);
        }
    }

    #[test]
    fn tie_free_spearman_formula(perm in Just((0..12).map(f64::from).collect::<Vec<_>>()).prop_shuffle()) {
        let x: Vec<f64> = (0..12).map(f64::from).collect();
        let s = correlate(&x, &perm, Method::Spearman, Transform::Raw).unwrap();
        prop_assume!(!s.is_degenerate());
        prop_assert!((s.coefficient - rank_formula_spearman(&x, &perm)).abs() < 1e-12);
        let k = correlate(&x, &perm, Method::Kendall, Transform::Raw).unwrap();
        prop_assert!((k.coefficient - brute_tau_b(&x, &perm).0).abs() < 1e-12);
    }

    #[test]
    fn coefficients_bounded((x, y) in arb_pair()) {
        prop_assume!(usable(&x, &y));
        for m in Method::ALL {
            let r = correlate(&x, &y, m, Transform::Raw).unwrap();
            prop_assert!(r.coefficient.abs() <= 1.0);
            prop_assert!((0.0..=1.0).contains(&r.p_value));
        }
    }

    #[test]
    fn discrepancy_in_unit_interval((x, y) in arb_pair()) {
        let d = rank_discrepancy(&x, &y).unwrap();
        prop_assert!(d.iter().all(|v| (0.0..=1.0).contains(v)));
        prop_assert!(d.iter().all(|v| *v == 0.0) || d.contains(&1.0));
    }
}
