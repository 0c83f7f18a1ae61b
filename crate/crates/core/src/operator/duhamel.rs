use num_complex::Complex64;

use super::matrix::{check_dim, eigen_decompose, max_abs, CMatrix, HermitianMatrix};
use super::Spectrum;
use crate::error::{Error, Result};

/// Default number of Gauss–Legendre points for the Duhamel integral.
pub const DEFAULT_QUAD_POINTS: usize = 64;

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre_unit(points: usize) -> (Vec<f64>, Vec<f64>) {
    let n = points;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

/// Max-entry residual of the Duhamel formula
/// `e^{-t D_A²} = e^{-t D²} - t ∫_0^1 e^{-s t D_A²} P(A) e^{-(1-s) t D²} ds`
/// with `D_A = D + A` and `P(A) = DA + AD + A²`.
pub fn duhamel_residual(
    spec: &Spectrum,
    a: &HermitianMatrix,
    t: f64,
    quad_points: usize,
) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::OutOfRange(format!("t = {t} must be positive")));
    }
    if quad_points < 2 {
        return Err(Error::OutOfRange("need at least 2 quadrature points".into()));
    }
    check_dim(spec, a.matrix())?;
    let n = spec.len();
    let l = spec.values();
    let da = eigen_decompose(&HermitianMatrix::spectrum_plus(spec, a)?)?;
    let p = CMatrix::from_fn(n, n, |i, j| (l[i] + l[j]) * a.entry(i, j)) + a.square();

    let (nodes, weights) = gauss_legendre_unit(quad_points);
    let mut integral = CMatrix::zeros(n, n);
    for (&s, &w) in nodes.iter().zip(&weights) {
        let left = da.apply(|mu| (-s * t * mu * mu).exp());
        let mut right = left * &p;
        for (j, &lj) in l.iter().enumerate() {
            let f = (-(1.0 - s) * t * lj * lj).exp();
            for i in 0..n {
                right[(i, j)] *= f;
            }
        }
        integral += right * Complex64::new(w, 0.0);
    }
    let perturbed = da.apply(|mu| (-t * mu * mu).exp());
    let mut residual = perturbed + integral * Complex64::new(t, 0.0);
    for (i, &li) in l.iter().enumerate() {
        residual[(i, i)] -= (-t * li * li).exp();
    }
    Ok(max_abs(&residual))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre_unit(5);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        let int: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(9)).sum();
        assert!((int - 0.1).abs() < 1e-14);
        let (x, w) = gauss_legendre_unit(64);
        let int: f64 = x.iter().zip(&w).map(|(x, w)| w * (3.0 * x).exp()).sum();
        assert!((int - (3f64.exp() - 1.0) / 3.0).abs() < 1e-13);
    }

    #[test]
    fn zero_perturbation_is_exact() {
        let s = Spectrum::linear(4).unwrap();
        assert_eq!(duhamel_residual(&s, &HermitianMatrix::zeros(4), 0.6, 16).unwrap(), 0.0);
    }

    #[test]
    fn scalar_case() {
        let s = Spectrum::new(vec![0.0]).unwrap();
        let a = HermitianMatrix::diagonal(&[0.9]);
        assert!(duhamel_residual(&s, &a, 1.2, 32).unwrap() <= 1e-12);
    }

    #[test]
    fn random_instance_converges() {
        let s = Spectrum::random_uniform(5, 2.0, 4).unwrap();
        let a = HermitianMatrix::random(5, 1.0, 5).unwrap();
        let coarse = duhamel_residual(&s, &a, 0.8, 4).unwrap();
        let fine = duhamel_residual(&s, &a, 0.8, 64).unwrap();
        assert!(fine <= 1e-8, "{fine}");
        assert!(fine < coarse);
    }
}
