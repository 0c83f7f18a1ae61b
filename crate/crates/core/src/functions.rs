//! Test functions `f` for the trace functional, with exact derivatives.
//!
//! The central class is the Gaussian mixture `f(x) = Σ_j w_j e^{-t_j x²}`,
//! a Laplace–Stieltjes transform of the atomic measure `Σ_j w_j δ_{t_j}`.
//! Its square companion is `g(u) = Σ_j w_j e^{-t_j u}`, so that `f(x) = g(x²)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::Spectrum;

/// Marker for "exact derivatives of every order".
pub const UNBOUNDED_ORDER: usize = usize::MAX;

/// A real function with exact derivatives up to [`max_order`](Self::max_order).
pub trait SmoothFunction: Send + Sync {
    /// `k`-th derivative at `x`. Callers check `k <= max_order()`.
    fn deriv(&self, k: usize, x: f64) -> f64;

    fn eval(&self, x: f64) -> f64 {
        self.deriv(0, x)
    }

    /// Largest exact derivative order.
    fn max_order(&self) -> usize;

    /// `g` with `f(x) = g(x²)`, when known.
    fn square_companion(&self) -> Option<&dyn SmoothFunction> {
        None
    }

    /// Laplace–Stieltjes measure `μ` with `f(x) = ∫ e^{-t x²} dμ(t)`, when known.
    fn laplace_measure(&self) -> Option<&DiscreteMeasure> {
        None
    }

    /// `k`-th derivative of the analytic continuation, if there is one.
    fn deriv_complex(&self, _k: usize, _z: Complex64) -> Option<Complex64> {
        None
    }
}

/// Fails unless `f` has an exact derivative of order `k`.
pub fn require_order(f: &dyn SmoothFunction, k: usize) -> Result<()> {
    if k > f.max_order() {
        Err(Error::InsufficientOrder {
            required: k,
            available: f.max_order(),
        })
    } else {
        Ok(())
    }
}

/// One atom `w δ_t` of a discrete measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub t: f64,
    pub w: f64,
}

/// A finite atomic measure on `t > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Atom>", into = "Vec<Atom>")]
pub struct DiscreteMeasure {
    atoms: Vec<Atom>,
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        for a in &atoms {
            if !(a.t.is_finite() && a.t > 0.0) {
                return Err(Error::InvalidMeasure(format!(
                    "atom location t = {} must be finite and positive",
                    a.t
                )));
            }
            if !a.w.is_finite() {
                return Err(Error::InvalidMeasure(format!("weight {} is not finite", a.w)));
            }
        }
        Ok(Self { atoms })
    }

    /// Convenience constructor from `(t, w)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(t, w)| Atom { t, w }).collect())
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }
}

impl TryFrom<Vec<Atom>> for DiscreteMeasure {
    type Error = Error;

    fn try_from(atoms: Vec<Atom>) -> Result<Self> {
        Self::new(atoms)
    }
}

impl From<DiscreteMeasure> for Vec<Atom> {
    fn from(m: DiscreteMeasure) -> Self {
        m.atoms
    }
}

/// Physicists' Hermite polynomial `H_k(y)` by the three-term recurrence.
fn hermite(k: usize, y: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * y);
    if k == 0 {
        return prev;
    }
    for j in 1..k {
        let next = 2.0 * y * cur - 2.0 * j as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn hermite_complex(k: usize, y: Complex64) -> Complex64 {
    let (mut prev, mut cur) = (Complex64::new(1.0, 0.0), 2.0 * y);
    if k == 0 {
        return prev;
    }
    for j in 1..k {
        let next = 2.0 * y * cur - 2.0 * j as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `g(u) = Σ_j w_j e^{-t_j u}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceExponential {
    measure: DiscreteMeasure,
}

impl LaplaceExponential {
    pub fn new(measure: DiscreteMeasure) -> Self {
        Self { measure }
    }
}

impl SmoothFunction for LaplaceExponential {
    fn deriv(&self, k: usize, u: f64) -> f64 {
        self.measure
            .atoms()
            .iter()
            .map(|a| a.w * (-a.t).powi(k as i32) * (-a.t * u).exp())
            .sum()
    }

    fn max_order(&self) -> usize {
        UNBOUNDED_ORDER
    }

    fn deriv_complex(&self, k: usize, z: Complex64) -> Option<Complex64> {
        Some(
            self.measure
                .atoms()
                .iter()
                .map(|a| a.w * (-a.t).powi(k as i32) * (-a.t * z).exp())
                .sum(),
        )
    }
}

/// `f(x) = Σ_j w_j e^{-t_j x²}`, the Laplace–Stieltjes transform of a discrete measure.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixture {
    companion: LaplaceExponential,
}

/// Builds the Gaussian mixture for `atoms` together with its square companion.
pub fn make_gaussian_mixture(atoms: DiscreteMeasure) -> GaussianMixture {
    GaussianMixture {
        companion: LaplaceExponential::new(atoms),
    }
}

impl GaussianMixture {
    pub fn new(atoms: &[(f64, f64)]) -> Result<Self> {
        Ok(make_gaussian_mixture(DiscreteMeasure::from_pairs(atoms)?))
    }

    pub fn measure(&self) -> &DiscreteMeasure {
        &self.companion.measure
    }
}

impl SmoothFunction for GaussianMixture {
    // d^k/dx^k e^{-t x²} = (-√t)^k H_k(√t x) e^{-t x²}
    fn deriv(&self, k: usize, x: f64) -> f64 {
        self.measure()
            .atoms()
            .iter()
            .map(|a| {
                let s = a.t.sqrt();
                a.w * (-s).powi(k as i32) * hermite(k, s * x) * (-a.t * x * x).exp()
            })
            .sum()
    }

    fn max_order(&self) -> usize {
        UNBOUNDED_ORDER
    }

    fn square_companion(&self) -> Option<&dyn SmoothFunction> {
        Some(&self.companion)
    }

    fn laplace_measure(&self) -> Option<&DiscreteMeasure> {
        Some(self.measure())
    }

    fn deriv_complex(&self, k: usize, z: Complex64) -> Option<Complex64> {
        Some(
            self.measure()
                .atoms()
                .iter()
                .map(|a| {
                    let s = a.t.sqrt();
                    a.w * (-s).powi(k as i32) * hermite_complex(k, s * z) * (-a.t * z * z).exp()
                })
                .sum(),
        )
    }
}

/// `c · e^{a x}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponential {
    pub scale: f64,
    pub rate: f64,
}

impl Exponential {
    pub fn new(scale: f64, rate: f64) -> Self {
        Self { scale, rate }
    }

    /// The plain exponential `e^x`.
    pub fn exp() -> Self {
        Self::new(1.0, 1.0)
    }
}

impl SmoothFunction for Exponential {
    fn deriv(&self, k: usize, x: f64) -> f64 {
        self.scale * self.rate.powi(k as i32) * (self.rate * x).exp()
    }

    fn max_order(&self) -> usize {
        UNBOUNDED_ORDER
    }

    fn deriv_complex(&self, k: usize, z: Complex64) -> Option<Complex64> {
        Some(self.scale * self.rate.powi(k as i32) * (self.rate * z).exp())
    }
}

/// Polynomial with ascending coefficients `c_0 + c_1 x + …`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    /// `x^d`.
    pub fn monomial(d: usize) -> Self {
        let mut c = vec![0.0; d + 1];
        c[d] = 1.0;
        Self::new(c)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    // coefficients of the k-th derivative, ascending
    fn derived(&self, k: usize) -> impl Iterator<Item = f64> + '_ {
        self.coeffs.iter().enumerate().skip(k).map(move |(i, &c)| {
            let falling: f64 = ((i - k + 1)..=i).map(|j| j as f64).product();
            c * falling
        })
    }
}

impl SmoothFunction for Polynomial {
    fn deriv(&self, k: usize, x: f64) -> f64 {
        let c: Vec<f64> = self.derived(k).collect();
        c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
    }

    fn max_order(&self) -> usize {
        UNBOUNDED_ORDER
    }

    fn deriv_complex(&self, k: usize, z: Complex64) -> Option<Complex64> {
        let c: Vec<f64> = self.derived(k).collect();
        Some(
            c.iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a),
        )
    }
}

/// The derivative `f'` of another function, sharing its derivative table.
pub struct Derivative<'a> {
    inner: &'a dyn SmoothFunction,
}

impl<'a> Derivative<'a> {
    pub fn of(inner: &'a dyn SmoothFunction) -> Self {
        Self { inner }
    }
}

impl SmoothFunction for Derivative<'_> {
    fn deriv(&self, k: usize, x: f64) -> f64 {
        self.inner.deriv(k + 1, x)
    }

    fn max_order(&self) -> usize {
        match self.inner.max_order() {
            UNBOUNDED_ORDER => UNBOUNDED_ORDER,
            m => m.saturating_sub(1),
        }
    }

    fn deriv_complex(&self, k: usize, z: Complex64) -> Option<Complex64> {
        self.inner.deriv_complex(k + 1, z)
    }
}

type RealFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// A function given by a caller-supplied table of derivative closures
/// `[f, f', f'', …]`.
pub struct DerivativeTable {
    derivs: Vec<RealFn>,
    companion: Option<Box<dyn SmoothFunction>>,
}

impl DerivativeTable {
    pub fn new(derivs: Vec<RealFn>) -> Result<Self> {
        if derivs.is_empty() {
            return Err(Error::OutOfRange("derivative table is empty".into()));
        }
        Ok(Self {
            derivs,
            companion: None,
        })
    }

    pub fn with_square_companion(mut self, g: Box<dyn SmoothFunction>) -> Self {
        self.companion = Some(g);
        self
    }
}

impl SmoothFunction for DerivativeTable {
    fn deriv(&self, k: usize, x: f64) -> f64 {
        (self.derivs[k])(x)
    }

    fn max_order(&self) -> usize {
        self.derivs.len() - 1
    }

    fn square_companion(&self) -> Option<&dyn SmoothFunction> {
        self.companion.as_deref()
    }
}

/// Options for [`check_summability`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SummabilityOptions {
    /// Multiply each atom by `e^{β t}` (the additive shift in the exponent).
    pub beta_shift: bool,
}

/// Finite truncation of `Σ_j |w_j| t_j^α Σ_i |λ_i|^β e^{-t_j ε λ_i²}`.
///
/// Every summand is non-negative, so the value is non-decreasing in the
/// truncation size of `spectrum`.
pub fn check_summability(
    mu: &DiscreteMeasure,
    spectrum: &Spectrum,
    alpha: f64,
    beta: f64,
    eps: f64,
    opts: SummabilityOptions,
) -> Result<f64> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::OutOfRange(format!("eps = {eps} must lie in [0, 1)")));
    }
    if !(alpha >= 0.0 && beta >= 0.0) {
        return Err(Error::OutOfRange(format!(
            "alpha = {alpha} and beta = {beta} must be non-negative"
        )));
    }
    Ok(mu
        .atoms()
        .iter()
        .map(|a| {
            let shift = if opts.beta_shift { (beta * a.t).exp() } else { 1.0 };
            let inner: f64 = spectrum
                .values()
                .iter()
                .map(|&l| l.abs().powf(beta) * (-a.t * eps * l * l).exp())
                .sum();
            a.w.abs() * a.t.powf(alpha) * shift * inner
        })
        .sum())
}
