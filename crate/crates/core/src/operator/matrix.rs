use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::Spectrum;
use crate::error::{Error, Result};
use crate::simplex::seeded_rng;

/// Dense complex matrix.
pub type CMatrix = DMatrix<Complex64>;

const HERMITIAN_TOL: f64 = 1e-12;

/// Largest absolute entry.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// A dense self-adjoint matrix in the eigenbasis of `D`, entries
/// `A_{mn} = (ψ_m, A ψ_n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRecord", into = "MatrixRecord")]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    /// Accepts `m` if `|m_{ij} - conj(m_{ji})| ≤ 1e-12 · max(1, max|m|)`,
    /// then stores the exactly Hermitian part.
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::OutOfRange("matrix must be at least 1x1".into()));
        }
        if m.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::OutOfRange("matrix has non-finite entries".into()));
        }
        let dev = max_abs(&(&m - m.adjoint()));
        if dev > HERMITIAN_TOL * max_abs(&m).max(1.0) {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self((&m + m.adjoint()).scale(0.5)))
    }

    pub fn from_real(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let m = CMatrix::from_fn(n, n, |i, j| {
            Complex64::new(rows[i].get(j).copied().unwrap_or(f64::NAN), 0.0)
        });
        Self::new(m)
    }

    pub fn zeros(n: usize) -> Self {
        Self(CMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Self(CMatrix::identity(n, n))
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self(CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    /// `D + A` with `D = diag(spectrum)`.
    pub fn spectrum_plus(spec: &Spectrum, a: &HermitianMatrix) -> Result<Self> {
        check_dim(spec, a.matrix())?;
        let mut m = a.0.clone();
        for (i, &l) in spec.values().iter().enumerate() {
            m[(i, i)] += l;
        }
        Ok(Self(m))
    }

    /// Random Hermitian matrix (Gaussian unitary ensemble shape) scaled to
    /// operator norm `norm`.
    pub fn random(n: usize, norm: f64, seed: u64) -> Result<Self> {
        Self::random_banded(n, n, norm, seed)
    }

    /// Random Hermitian matrix supported on `|i - j| ≤ bandwidth`, scaled to
    /// operator norm `norm`.
    pub fn random_banded(n: usize, bandwidth: usize, norm: f64, seed: u64) -> Result<Self> {
        if n == 0 || !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::OutOfRange(format!(
                "random matrix needs n ≥ 1 and norm > 0, got n = {n}, norm = {norm}"
            )));
        }
        let mut rng = seeded_rng(seed, 0);
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                if j - i > bandwidth {
                    continue;
                }
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = if i == j { 0.0 } else { StandardNormal.sample(&mut rng) };
                m[(i, j)] = Complex64::new(re, im);
                m[(j, i)] = Complex64::new(re, -im);
            }
        }
        let h = Self(m);
        let current = h.operator_norm()?;
        if current == 0.0 {
            return Ok(h);
        }
        Ok(h.scaled(norm / current))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_inner(self) -> CMatrix {
        self.0
    }

    pub fn entry(&self, m: usize, n: usize) -> Complex64 {
        self.0[(m, n)]
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    /// Largest `|eigenvalue|`.
    pub fn operator_norm(&self) -> Result<f64> {
        Ok(eigen_decompose(self)?.eigenvalues.max_abs())
    }

    /// `U A U*`.
    pub fn conjugated(&self, u: &CMatrix) -> Result<Self> {
        Self::new(u * &self.0 * u.adjoint())
    }

    /// `A²`.
    pub fn square(&self) -> CMatrix {
        &self.0 * &self.0
    }
}

/// Serialized form: real and (optional) imaginary parts as row lists.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixRecord {
    pub fn to_matrix(&self) -> Result<CMatrix> {
        let n = self.re.len();
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if n == 0 || !shape_ok(&self.re) || self.im.as_ref().is_some_and(|im| !shape_ok(im)) {
            return Err(Error::OutOfRange("matrix record must be square and non-empty".into()));
        }
        Ok(CMatrix::from_fn(n, n, |i, j| {
            let im = self.im.as_ref().map_or(0.0, |m| m[i][j]);
            Complex64::new(self.re[i][j], im)
        }))
    }

    pub fn from_matrix(m: &CMatrix) -> Self {
        let rows = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        let im = rows(|z| z.im);
        let has_im = im.iter().flatten().any(|&x| x != 0.0);
        Self {
            re: rows(|z| z.re),
            im: has_im.then_some(im),
        }
    }
}

impl TryFrom<MatrixRecord> for HermitianMatrix {
    type Error = Error;

    fn try_from(r: MatrixRecord) -> Result<Self> {
        Self::new(r.to_matrix()?)
    }
}

impl From<HermitianMatrix> for MatrixRecord {
    fn from(h: HermitianMatrix) -> Self {
        MatrixRecord::from_matrix(&h.0)
    }
}

pub(crate) fn check_dim(spec: &Spectrum, m: &CMatrix) -> Result<()> {
    if m.nrows() != spec.len() || m.ncols() != spec.len() {
        return Err(Error::DimensionMismatch {
            expected: spec.len(),
            got: m.nrows().max(m.ncols()),
        });
    }
    Ok(())
}

fn weighted(spec: &Spectrum, a: &CMatrix, w: impl Fn(f64, f64) -> f64) -> Result<CMatrix> {
    check_dim(spec, a)?;
    let l = spec.values();
    Ok(CMatrix::from_fn(a.nrows(), a.ncols(), |m, n| a[(m, n)] * w(l[m], l[n])))
}

/// `{D, A}_{mn} = (λ_m + λ_n) A_{mn}`.
pub fn anticommutator_d(spec: &Spectrum, a: &CMatrix) -> Result<CMatrix> {
    weighted(spec, a, |x, y| x + y)
}

/// `[D, A]_{mn} = (λ_m - λ_n) A_{mn}`.
pub fn commutator_d(spec: &Spectrum, a: &CMatrix) -> Result<CMatrix> {
    weighted(spec, a, |x, y| x - y)
}

/// `[D², A]_{mn} = (λ_m² - λ_n²) A_{mn}`.
pub fn commutator_d2(spec: &Spectrum, a: &CMatrix) -> Result<CMatrix> {
    weighted(spec, a, |x, y| x * x - y * y)
}

/// `H = U diag(λ) U*` with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Spectrum,
    pub eigenvectors: CMatrix,
}

impl EigenDecomposition {
    /// `U φ(Λ) U*`.
    pub fn apply(&self, phi: impl Fn(f64) -> f64) -> CMatrix {
        let u = &self.eigenvectors;
        let n = u.nrows();
        let mut scaled = u.clone();
        for (j, &l) in self.eigenvalues.values().iter().enumerate() {
            let w = phi(l);
            for i in 0..n {
                scaled[(i, j)] *= w;
            }
        }
        scaled * u.adjoint()
    }
}

/// Dense Hermitian eigendecomposition.
pub fn eigen_decompose(h: &HermitianMatrix) -> Result<EigenDecomposition> {
    let eig = h.0.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let n = h.dim();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(EigenDecomposition {
        eigenvalues: Spectrum::new(values)?,
        eigenvectors: vectors,
    })
}

/// `e^{-t H²}`.
pub fn heat_kernel(h: &HermitianMatrix, t: f64) -> Result<CMatrix> {
    Ok(eigen_decompose(h)?.apply(|l| (-t * l * l).exp()))
}

/// A random unitary (QR of a complex Gaussian matrix).
pub fn random_unitary(n: usize, seed: u64) -> CMatrix {
    let mut rng = seeded_rng(seed, 0);
    let g = CMatrix::from_fn(n, n, |_, _| {
        Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
    });
    g.qr().q()
}
