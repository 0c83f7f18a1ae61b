use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use spectral_taylor::bounds::{
    getzler_szenes_check, holder_estimate_check, simplex_bound, simplex_bound_check,
    simplex_weight_integral, HolderParams,
};
use spectral_taylor::operator::{heat_trace, CMatrix, HermitianMatrix, Spectrum};

#[test]
fn simplex_weight_examples() {
    // ∫_0^1 s^{-1/2} ds, ∫_0^1 (s(1-s))^{-1/2} ds, ∫_0^1 s^{-1/2} (1 - s) ds
    let cases = [(1, 1, 2.0), (1, 2, PI), (2, 1, 4.0 / 3.0), (3, 0, 1.0 / 6.0)];
    for (m, k, expect) in cases {
        let closed = simplex_weight_integral(m, k).unwrap();
        assert!((closed - expect).abs() < 1e-13, "m={m} k={k}: {closed}");
        let mc = simplex_bound_check(m, k, 20_000, 9).unwrap();
        assert!((mc.lhs - expect).abs() < 1e-12 * expect, "m={m} k={k}: {}", mc.lhs);
        assert!(mc.passed && mc.margin >= 0.0);
    }
    assert_eq!(simplex_bound(3, 1).unwrap(), PI / 2.0);
    assert_eq!(simplex_bound(2, 3).unwrap(), PI.powi(3));
}

#[test]
fn simplex_bound_holds_on_the_grid() {
    for m in 0..=8 {
        for k in 0..=(m + 1).min(4) {
            let r = simplex_bound_check(m, k, 10_000, 3).unwrap();
            assert!(r.passed, "m={m} k={k}: {r:?}");
        }
    }
}

#[test]
fn getzler_szenes_margin_at_zero_perturbation() {
    let s = Spectrum::new(vec![-2.0, -0.5, 0.3, 1.7]).unwrap();
    let zero = HermitianMatrix::zeros(4);
    for eps in [0.1, 0.5, 0.9] {
        let r = getzler_szenes_check(&s, &zero, 0.7, eps).unwrap();
        let lhs = heat_trace(&s, (1.0 - 0.5 * eps) * 0.7).unwrap();
        let rhs = heat_trace(&s, (1.0 - eps) * 0.7).unwrap();
        assert!((r.lhs - lhs).abs() < 1e-14 && (r.rhs - rhs).abs() < 1e-14);
        assert!(r.passed && r.margin > 0.0);
    }
}

#[test]
fn getzler_szenes_margin_is_continuous_in_v() {
    let s = Spectrum::new(vec![-1.0, 0.0, 1.5]).unwrap();
    let v = HermitianMatrix::random(3, 1.0, 4).unwrap();
    let base = getzler_szenes_check(&s, &HermitianMatrix::zeros(3), 1.0, 0.5).unwrap().margin;
    let mut prev = f64::INFINITY;
    for c in [1e-1, 1e-2, 1e-3, 1e-4] {
        let m = getzler_szenes_check(&s, &v.scaled(c), 1.0, 0.5).unwrap().margin;
        let gap = (m - base).abs();
        assert!(gap < prev, "c={c}: {gap} vs {prev}");
        prev = gap;
    }
    assert!(prev < 1e-3);
}

#[test]
fn getzler_szenes_rejects_bad_parameters() {
    let s = Spectrum::new(vec![0.0]).unwrap();
    let v = HermitianMatrix::zeros(1);
    assert!(getzler_szenes_check(&s, &v, 1.0, 0.0).is_err());
    assert!(getzler_szenes_check(&s, &v, 1.0, 1.0).is_err());
    assert!(getzler_szenes_check(&s, &v, -1.0, 0.5).is_err());
}

fn params(seed: u64) -> HolderParams {
    HolderParams { t: 1.0, eps: 0.5, samples: 20_000, seed }
}

#[test]
fn holder_estimate_holds_for_small_cases() {
    let s = Spectrum::new(vec![-1.0, -0.2, 0.6, 1.4]).unwrap();
    let mats: Vec<HermitianMatrix> =
        (0..3).map(|k| HermitianMatrix::random(4, 0.5, 60 + k).unwrap()).collect();
    let ops: Vec<&HermitianMatrix> = mats.iter().collect();
    for alphas in [[0u8, 0, 0], [1, 0, 0], [0, 1, 1], [1, 1, 0], [1, 1, 1]] {
        let r = holder_estimate_check(&s, &ops, &alphas, None, params(2)).unwrap();
        assert!(r.passed, "{alphas:?}: {r:?}");
    }
}

#[test]
fn holder_estimate_is_invariant_under_phases() {
    // diagonal unitaries commute with D and leave the integrand unchanged
    let s = Spectrum::new(vec![-1.0, 0.1, 0.9]).unwrap();
    let mats: Vec<HermitianMatrix> =
        (0..3).map(|k| HermitianMatrix::random(3, 0.5, 80 + k).unwrap()).collect();
    let u = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(
        [0.3, 1.9, -2.4].iter().map(|&th: &f64| Complex64::from_polar(1.0, th)).collect(),
    ));
    let rotated: Vec<HermitianMatrix> = mats.iter().map(|m| m.conjugated(&u).unwrap()).collect();
    let ops: Vec<&HermitianMatrix> = mats.iter().collect();
    let rops: Vec<&HermitianMatrix> = rotated.iter().collect();
    let alphas = [1u8, 0, 1];
    let a = holder_estimate_check(&s, &ops, &alphas, None, params(5)).unwrap();
    let b = holder_estimate_check(&s, &rops, &alphas, None, params(5)).unwrap();
    assert!((a.lhs - b.lhs).abs() <= 1e-9 * a.lhs, "{} vs {}", a.lhs, b.lhs);
    assert!((a.rhs - b.rhs).abs() <= 1e-9 * a.rhs);
}

#[test]
fn holder_rejects_mismatched_exponents() {
    let s = Spectrum::new(vec![0.0, 1.0]).unwrap();
    let a = HermitianMatrix::random(2, 0.5, 1).unwrap();
    assert!(holder_estimate_check(&s, &[&a, &a], &[1], None, params(1)).is_err());
    assert!(holder_estimate_check(&s, &[], &[], None, params(1)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn getzler_szenes_holds(seed in any::<u64>(), dim in 1usize..7, norm in 0.0f64..2.0,
                            t in 0.1f64..3.0, eps in 0.05f64..0.95) {
        let s = Spectrum::random_uniform(dim, 3.0, seed).unwrap();
        let v = HermitianMatrix::random(dim, norm, seed ^ 0x77).unwrap();
        let r = getzler_szenes_check(&s, &v, t, eps).unwrap();
        prop_assert!(r.passed, "{:?}", r);
    }

    #[test]
    fn simplex_estimate_is_exact(m in 1usize..9, k in 0usize..5, seed in any::<u64>()) {
        prop_assume!(k <= m + 1);
        let r = simplex_bound_check(m, k, 500, seed).unwrap();
        let closed = simplex_weight_integral(m, k).unwrap();
        prop_assert!((r.lhs - closed).abs() <= 1e-12 * closed, "{} vs {}", r.lhs, closed);
    }
}
