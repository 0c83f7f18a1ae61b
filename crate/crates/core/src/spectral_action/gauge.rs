use num_complex::Complex64;

use super::terms::gateaux_fd_mixed;
use crate::error::{Error, Result};
use crate::functions::SmoothFunction;
use crate::operator::{commutator_d, CMatrix, HermitianMatrix, Spectrum};

/// First-order term `S^{(1)}(0)(A) = Σ_i A_ii f'(λ_i)`.
pub fn tadpole_check(spec: &Spectrum, a: &HermitianMatrix, f: &dyn SmoothFunction) -> Result<f64> {
    if a.dim() != spec.len() {
        return Err(Error::DimensionMismatch {
            expected: spec.len(),
            got: a.dim(),
        });
    }
    Ok(spec
        .values()
        .iter()
        .enumerate()
        .map(|(i, &l)| a.entry(i, i).re * f.deriv(1, l))
        .sum())
}

/// The pure-gauge direction `[D, a]`; it is self-adjoint when `a` is
/// anti-Hermitian.
pub fn pure_gauge_direction(spec: &Spectrum, a: &CMatrix) -> Result<HermitianMatrix> {
    HermitianMatrix::new(commutator_d(spec, a)?)
}

/// Quadratic form on a pure-gauge direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeDiagnostic {
    /// `S^{(2)}(0)(A, [D, a])` by mixed finite differences.
    pub mixed_second: f64,
    /// `S^{(1)}(0)([a, A])`; unitary invariance of `tr f` forces equality
    /// with `mixed_second`, so it vanishes with the tadpole.
    pub tadpole_of_commutator: f64,
}

/// Evaluates `S^{(2)}(0)(A, [D, a])` for anti-Hermitian `a` together with
/// the first-order term it must equal.
pub fn gauge_degeneracy(
    spec: &Spectrum,
    a: &HermitianMatrix,
    generator: &CMatrix,
    f: &dyn SmoothFunction,
    h: f64,
) -> Result<GaugeDiagnostic> {
    let gauge = pure_gauge_direction(spec, generator)?;
    let mixed_second = gateaux_fd_mixed(spec, &[a, &gauge], f, h)?;
    let comm = generator * a.matrix() - a.matrix() * generator;
    let comm = HermitianMatrix::new(comm)?;
    Ok(GaugeDiagnostic {
        mixed_second,
        tadpole_of_commutator: tadpole_check(spec, &comm, f)?,
    })
}

/// `i · b` for Hermitian `b`: an anti-Hermitian gauge generator.
pub fn anti_hermitian(b: &HermitianMatrix) -> CMatrix {
    b.matrix() * Complex64::new(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::GaussianMixture;

    #[test]
    fn zero_diagonal_has_no_tadpole() {
        let f = GaussianMixture::new(&[(1.0, 1.0)]).unwrap();
        let s = Spectrum::new(vec![-0.3, 0.5, 1.1]).unwrap();
        let a = HermitianMatrix::from_real(&[
            vec![0.0, 0.4, -0.2],
            vec![0.4, 0.0, 0.3],
            vec![-0.2, 0.3, 0.0],
        ])
        .unwrap();
        assert_eq!(tadpole_check(&s, &a, &f).unwrap(), 0.0);
        let b = HermitianMatrix::random(3, 1.0, 4).unwrap();
        let pure = pure_gauge_direction(&s, &anti_hermitian(&b)).unwrap();
        assert!(tadpole_check(&s, &pure, &f).unwrap().abs() < 1e-16);
    }

    #[test]
    fn tadpole_matches_first_difference() {
        let f = GaussianMixture::new(&[(0.8, 1.0), (2.0, 0.5)]).unwrap();
        let s = Spectrum::new(vec![-0.9, 0.2, 0.6, 1.4]).unwrap();
        let a = HermitianMatrix::random(4, 0.7, 12).unwrap();
        let fd = super::super::terms::gateaux_fd(1, &s, &a, &f, 0.05).unwrap();
        assert!((tadpole_check(&s, &a, &f).unwrap() - fd).abs() < 1e-6);
    }

    #[test]
    fn gauge_direction_identity() {
        let f = GaussianMixture::new(&[(1.0, 1.0)]).unwrap();
        let s = Spectrum::new(vec![-0.9, 0.2, 0.6, 1.4]).unwrap();
        let a = HermitianMatrix::random(4, 0.5, 3).unwrap();
        let b = HermitianMatrix::random(4, 0.5, 5).unwrap();
        let d = gauge_degeneracy(&s, &a, &anti_hermitian(&b), &f, 0.05).unwrap();
        assert!(
            (d.mixed_second - d.tadpole_of_commutator).abs() < 1e-6,
            "{d:?}"
        );
    }
}
