use proptest::prelude::*;

use spectral_taylor::divdiff::{
    dd_chain_generic, dd_chain_square, dd_contour, dd_derivative_sum, dd_hermite_mc,
    dd_of_derivative, dd_recursive, Contour, NodeList,
};
use spectral_taylor::functions::{
    Exponential, GaussianMixture, LaplaceExponential, Polynomial, SmoothFunction,
};

fn nodes(x: &[f64]) -> NodeList {
    NodeList::new(x.to_vec()).unwrap()
}

// f[x_0, …, x_n] = Σ_i f(x_i) / Π_{j≠i} (x_i − x_j) for distinct nodes
fn lagrange_dd(f: &dyn SmoothFunction, x: &[f64]) -> f64 {
    x.iter()
        .enumerate()
        .map(|(i, &xi)| {
            let denom: f64 = x
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &xj)| xi - xj)
                .product();
            f.eval(xi) / denom
        })
        .sum()
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn square() -> Polynomial {
    Polynomial::monomial(2)
}

#[test]
fn exponential_against_hermite_monte_carlo() {
    let x = nodes(&[0.3, 1.1, 2.0]);
    let exact = dd_recursive(&Exponential::exp(), &x).unwrap();
    assert!(rel(exact, lagrange_dd(&Exponential::exp(), x.nodes())) < 1e-13);
    let mc = dd_hermite_mc(&Exponential::exp(), &x, 200_000, 11).unwrap();
    assert!(mc.covers(exact, 3.0), "{mc:?} vs {exact}");
}

#[test]
fn exponential_first_difference_monte_carlo() {
    let mc = dd_hermite_mc(&Exponential::exp(), &nodes(&[0.0, 1.0]), 100_000, 3).unwrap();
    assert!(mc.covers(std::f64::consts::E - 1.0, 3.0), "{mc:?}");
}

#[test]
fn gaussian_against_hermite_monte_carlo_million_samples() {
    let f = GaussianMixture::new(&[(1.0, 1.0)]).unwrap();
    let x = nodes(&[-1.0, 0.5, 2.0]);
    let exact = dd_recursive(&f, &x).unwrap();
    assert!(rel(exact, lagrange_dd(&f, x.nodes())) < 1e-12);
    let mc = dd_hermite_mc(&f, &x, 1_000_000, 5).unwrap();
    assert!(mc.covers(exact, 3.0), "{mc:?} vs {exact}");
    assert!(mc.stderr < 1e-3);
}

#[test]
fn contour_matches_recursive_for_decaying_exponential() {
    let g = Exponential::new(1.0, -1.0);
    let x = nodes(&[0.1, 0.2, 0.3]);
    let c = dd_contour(&g, &x, &Contour::new(0.2, 1.5, 256)).unwrap();
    let r = dd_recursive(&g, &x).unwrap();
    assert!((c - r).abs() < 1e-10 * r.abs(), "{c} vs {r}");
    // the closed form (e^{-0.1} - 2e^{-0.2} + e^{-0.3}) / (2 · 0.01)
    let closed = ((-0.1f64).exp() - 2.0 * (-0.2f64).exp() + (-0.3f64).exp()) / 0.02;
    assert!(rel(r, closed) < 1e-11);
}

#[test]
fn chain_square_two_and_three_nodes() {
    let f = GaussianMixture::new(&[(0.7, 1.0), (1.9, -0.3)]).unwrap();
    let g = f.square_companion().unwrap();
    let (x0, x1, x2) = (0.4, -1.1, 1.3);
    let gdd = |pts: &[f64]| lagrange_dd(g, &pts.iter().map(|x| x * x).collect::<Vec<_>>());

    let two = dd_chain_square(g, &nodes(&[x0, x1])).unwrap();
    assert!(rel(two, (x0 + x1) * gdd(&[x0, x1])) < 1e-12);

    let three = dd_chain_square(g, &nodes(&[x0, x1, x2])).unwrap();
    let expect = (x0 + x1) * (x1 + x2) * gdd(&[x0, x1, x2]) + gdd(&[x0, x2]);
    assert!(rel(three, expect) < 1e-11, "{three} vs {expect}");
}

#[test]
fn chain_square_four_nodes_gaussian() {
    let f = GaussianMixture::new(&[(1.0, 1.0)]).unwrap();
    let x = nodes(&[0.4, -0.8, 1.3, 0.1]);
    let chain = dd_chain_square(f.square_companion().unwrap(), &x).unwrap();
    let direct = lagrange_dd(&f, x.nodes());
    assert!((chain - direct).abs() < 1e-10, "{chain} vs {direct}");
}

#[test]
fn chain_generic_reduces_to_chain_square() {
    let g = Exponential::exp();
    let x = nodes(&[0.5, 1.5]);
    let generic = dd_chain_generic(&g, &square(), &x).unwrap();
    let sq = dd_chain_square(&g, &x).unwrap();
    assert!(rel(generic, sq) < 1e-13);
    let expect = ((2.25f64).exp() - (0.25f64).exp()) / (1.5 - 0.5);
    assert!(rel(sq, expect) < 1e-13);
}

#[test]
fn chain_generic_five_random_nodes() {
    let f = GaussianMixture::new(&[(0.6, 1.2), (1.4, 0.5)]).unwrap();
    let x = nodes(&[-1.7, -0.35, 0.2, 0.95, 1.8]);
    let generic = dd_chain_generic(f.square_companion().unwrap(), &square(), &x).unwrap();
    assert!(rel(generic, lagrange_dd(&f, x.nodes())) < 1e-9);
}

#[test]
fn derivative_sum_hand_cases() {
    let sq = square();
    assert_eq!(dd_derivative_sum(&sq, &nodes(&[0.7])).unwrap(), 1.4);
    let cube = Polynomial::monomial(3);
    let v = dd_derivative_sum(&cube, &nodes(&[0.0, 1.0])).unwrap();
    assert!((v - 3.0).abs() < 1e-14);

    let f = GaussianMixture::new(&[(1.0, 1.0), (0.3, -0.5)]).unwrap();
    let x = nodes(&[-1.2, 0.3, 0.9]);
    let sum = dd_derivative_sum(&f, &x).unwrap();
    let fprime: Vec<f64> = x.nodes().iter().map(|&t| f.deriv(1, t)).collect();
    let direct = {
        let (a, b, c) = (x.nodes()[0], x.nodes()[1], x.nodes()[2]);
        let ab = (fprime[1] - fprime[0]) / (b - a);
        let bc = (fprime[2] - fprime[1]) / (c - b);
        (bc - ab) / (c - a)
    };
    assert!(rel(sum, direct) < 1e-10, "{sum} vs {direct}");
    assert!(rel(sum, dd_of_derivative(&f, &x).unwrap()) < 1e-10);
}

#[test]
fn confluent_limit_converges() {
    let f = GaussianMixture::new(&[(1.0, 1.0), (2.0, 0.5)]).unwrap();
    let x = 0.37;
    let confluent = dd_recursive(&f, &nodes(&[x, x, x])).unwrap();
    assert!(rel(confluent, f.deriv(2, x) / 2.0) < 1e-14);
    let mut last = f64::INFINITY;
    for h in [1e-3, 1e-4, 1e-5] {
        let err = (dd_recursive(&f, &nodes(&[x, x + h, x + 2.0 * h])).unwrap() - confluent).abs();
        assert!(err < last, "h={h}: {err} !< {last}");
        last = err;
    }
    assert!(last < 1e-4);
}

#[test]
fn close_nodes_stay_accurate() {
    // nodes 1e-3 apart would lose ~1e-6 relative through Newton quotients
    let f = GaussianMixture::new(&[(1.0, 1.0)]).unwrap();
    let x = [-1.4374, -1.4364, -1.4354, -1.4344, 0.63];
    let v = dd_recursive(&f, &nodes(&x)).unwrap();
    let contour = dd_contour(&f, &nodes(&x), &Contour::enclosing(&x, 1.0, 1024)).unwrap();
    assert!(rel(v, contour) < 1e-11, "{v} vs {contour}");
}

fn distinct(x: &[f64], gap: f64) -> bool {
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    s.windows(2).all(|w| w[1] - w[0] >= gap)
}

fn mixture() -> impl Strategy<Value = GaussianMixture> {
    prop::collection::vec((0.25f64..2.0, -1.0f64..1.0), 1..=3)
        .prop_map(|atoms| GaussianMixture::new(&atoms).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn permutation_symmetry(
        f in mixture(),
        x in prop::collection::vec(-2.0f64..2.0, 1..=7),
        rot in 0usize..7,
    ) {
        let a = dd_recursive(&f, &nodes(&x)).unwrap();
        let mut y = x.clone();
        y.reverse();
        let len = y.len();
        y.rotate_left(rot % len);
        let b = dd_recursive(&f, &nodes(&y)).unwrap();
        prop_assert!(rel(a, b) < 1e-10 || (a - b).abs() < 1e-14, "{} vs {}", a, b);
    }

    #[test]
    fn polynomial_annihilation(
        coeffs in prop::collection::vec(-2.0f64..2.0, 1..=5),
        x in prop::collection::vec(-2.0f64..2.0, 2..=8),
    ) {
        prop_assume!(distinct(&x, 1e-2));
        let p = Polynomial::new(coeffs.clone());
        let d = p.degree();
        let v = dd_recursive(&p, &nodes(&x)).unwrap();
        let scale: f64 = coeffs.iter().map(|c| c.abs()).sum::<f64>() * 3f64.powi(d as i32);
        if x.len() > d + 1 {
            prop_assert!(v.abs() <= 1e-9 * scale, "{}", v);
        } else if x.len() == d + 1 {
            prop_assert!((v - coeffs[d]).abs() <= 1e-9 * scale, "{} vs {}", v, coeffs[d]);
        }
    }

    #[test]
    fn recursive_matches_lagrange_and_contour(
        f in mixture(),
        x in prop::collection::vec(-2.0f64..2.0, 1..=6),
    ) {
        prop_assume!(distinct(&x, 0.2));
        let r = dd_recursive(&f, &nodes(&x)).unwrap();
        let l = lagrange_dd(&f, &x);
        let c = dd_contour(&f, &nodes(&x), &Contour::enclosing(&x, 1.0, 512)).unwrap();
        let scale = r.abs().max(1e-3);
        prop_assert!((r - l).abs() < 1e-9 * scale, "{} vs {}", r, l);
        prop_assert!((r - c).abs() < 1e-9 * scale, "{} vs {}", r, c);
    }

    #[test]
    fn chain_square_equivalence(
        f in mixture(),
        x in prop::collection::vec(-2.0f64..2.0, 1..=7),
    ) {
        prop_assume!(distinct(&x, 1e-3));
        let g = f.square_companion().unwrap();
        let chain = dd_chain_square(g, &nodes(&x)).unwrap();
        let direct = dd_recursive(&f, &nodes(&x)).unwrap();
        let generic = dd_chain_generic(g, &square(), &nodes(&x)).unwrap();
        prop_assert!(rel(chain, direct) < 1e-9, "{} vs {}", chain, direct);
        prop_assert!(rel(generic, direct) < 1e-9, "{} vs {}", generic, direct);
    }

    #[test]
    fn derivative_sum_identity(
        f in mixture(),
        x in prop::collection::vec(-2.0f64..2.0, 1..=6),
    ) {
        prop_assume!(distinct(&x, 1e-3));
        let sum = dd_derivative_sum(&f, &nodes(&x)).unwrap();
        let direct = dd_of_derivative(&f, &nodes(&x)).unwrap();
        prop_assert!(rel(sum, direct) < 1e-9, "{} vs {}", sum, direct);
    }

    #[test]
    fn laplace_exponential_is_square_companion(
        f in mixture(),
        x in -3.0f64..3.0,
    ) {
        let g = LaplaceExponential::new(f.measure().clone());
        prop_assert!((f.eval(x) - g.eval(x * x)).abs() <= 1e-12);
    }
}
