//! Taylor contributions `S_D^{(n)}(0)(A, …, A) / n!` of `S_D[A] = tr f(D + A)`
//! by independent routes.

use num_complex::Complex64;

use crate::divdiff::{ConfluentEvaluator, Contour};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::functions::{require_order, Derivative, SmoothFunction};
use crate::multi_index::epsilon_enumerate;
use crate::operator::{
    anticommutator_d, bracket_dd_with, eigen_decompose, BracketOptions, CMatrix,
    HermitianMatrix, Spectrum,
};
use crate::simplex::factorial;
use crate::tuples::{tuple_sum, DEFAULT_TUPLE_BUDGET};

/// Shared knobs for the tuple-summing routes.
#[derive(Debug, Clone, Copy)]
pub struct TermOptions {
    pub exec: Exec,
    /// Largest admissible number of index tuples.
    pub budget: u64,
    /// Skip tuples containing an entry with `|A_ij|` below this value.
    pub prune_below: Option<f64>,
    /// Sum over necklace representatives weighted by their period.
    pub cyclic_reduction: bool,
}

impl Default for TermOptions {
    fn default() -> Self {
        Self {
            exec: Exec::default(),
            budget: DEFAULT_TUPLE_BUDGET,
            prune_below: None,
            cyclic_reduction: true,
        }
    }
}

fn check_dims(spec: &Spectrum, a: &HermitianMatrix) -> Result<()> {
    if a.dim() != spec.len() {
        return Err(Error::DimensionMismatch {
            expected: spec.len(),
            got: a.dim(),
        });
    }
    Ok(())
}

/// `tr f(D + A)` from the eigenvalues of `D + A`.
pub fn action_exact(spec: &Spectrum, a: &HermitianMatrix, f: &dyn SmoothFunction) -> Result<f64> {
    check_dims(spec, a)?;
    let eig = eigen_decompose(&HermitianMatrix::spectrum_plus(spec, a)?)?;
    Ok(eig.eigenvalues.values().iter().map(|&mu| f.eval(mu)).sum())
}

fn order_zero(spec: &Spectrum, f: &dyn SmoothFunction) -> f64 {
    spec.values().iter().map(|&l| f.eval(l)).sum()
}

// Row-major copy of A for the hot loops.
fn flatten(a: &HermitianMatrix) -> Vec<Complex64> {
    let n = a.dim();
    (0..n * n).map(|k| a.entry(k / n, k % n)).collect()
}

// A_{i_1 i_2} ⋯ A_{i_n i_1}, or None when pruned.
#[inline]
fn cyclic_coefficient(
    flat: &[Complex64],
    dim: usize,
    idx: &[usize],
    prune: Option<f64>,
) -> Option<Complex64> {
    let n = idx.len();
    let mut c = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let e = flat[idx[k] * dim + idx[(k + 1) % n]];
        if let Some(p) = prune {
            if e.norm() < p {
                return None;
            }
        }
        c *= e;
    }
    Some(c)
}

/// Period of `idx` under rotation if it is the lexicographically smallest
/// rotation, otherwise `None`.
pub(crate) fn necklace_weight(idx: &[usize]) -> Option<usize> {
    let n = idx.len();
    for r in 1..n {
        let rotated = idx[r..].iter().chain(&idx[..r]);
        match rotated.cmp(idx.iter()) {
            std::cmp::Ordering::Less => return None,
            std::cmp::Ordering::Equal => return Some(r),
            std::cmp::Ordering::Greater => {}
        }
    }
    Some(n)
}

/// `(1/n) Σ A_{i_1 i_2} ⋯ A_{i_n i_1} f'[λ_{i_1}, …, λ_{i_n}]`, or `Σ f(λ_i)`
/// at `n = 0`.
pub fn taylor_term(
    n: usize,
    spec: &Spectrum,
    a: &HermitianMatrix,
    f: &dyn SmoothFunction,
) -> Result<f64> {
    taylor_term_with(n, spec, a, f, &TermOptions::default()).map(|z| z.re)
}

/// [`taylor_term`] before taking the real part; the imaginary part is
/// rounding residue for Hermitian `A`.
pub fn taylor_term_with(
    n: usize,
    spec: &Spectrum,
    a: &HermitianMatrix,
    f: &dyn SmoothFunction,
    opts: &TermOptions,
) -> Result<Complex64> {
    check_dims(spec, a)?;
    if n == 0 {
        return Ok(Complex64::new(order_zero(spec, f), 0.0));
    }
    require_order(f, n)?;
    let df = Derivative::of(f);
    let eval = ConfluentEvaluator::with_default_tol(&df, spec.values(), n - 1);
    let dim = spec.len();
    let flat = flatten(a);
    let cyclic = opts.cyclic_reduction;
    let sum = tuple_sum(opts.exec, dim, n, opts.budget, |idx, ws| {
        let weight = if cyclic {
            match necklace_weight(idx) {
                Some(p) => p as f64,
                None => return Ok(Complex64::new(0.0, 0.0)),
            }
        } else {
            1.0
        };
        match cyclic_coefficient(&flat, dim, idx, opts.prune_below) {
            Some(c) if c.re != 0.0 || c.im != 0.0 => Ok(c * (weight * eval.eval(idx, ws)?)),
            _ => Ok(Complex64::new(0.0, 0.0)),
        }
    })?;
    Ok(sum / n as f64)
}

const MAX_THEOREM_ORDER: usize = 64;

/// `Σ A_{i_n i_1} A_{i_1 i_2} ⋯ A_{i_{n-1} i_n} f[λ_{i_n}, λ_{i_1}, …, λ_{i_n}]`,
/// the `(n+1)`-node form with the cyclically repeated node. Equals
/// [`taylor_term`].
pub fn taylor_term_theorem_form(
    n: usize,
    spec: &Spectrum,
    a: &HermitianMatrix,
    f: &dyn SmoothFunction,
) -> Result<f64> {
    taylor_term_theorem_form_with(n, spec, a, f, &TermOptions::default()).map(|z| z.re)
}

pub fn taylor_term_theorem_form_with(
    n: usize,
    spec: &Spectrum,
    a: &HermitianMatrix,
    f: &dyn SmoothFunction,
    opts: &TermOptions,
) -> Result<Complex64> {
    check_dims(spec, a)?;
    if n == 0 {
        return Ok(Complex64::new(order_zero(spec, f), 0.0));
    }
    require_order(f, n)?;
    if n >= MAX_THEOREM_ORDER {
        return Err(Error::OutOfRange(format!("order {n} exceeds {}", MAX_THEOREM_ORDER - 1)));
    }
    let eval = ConfluentEvaluator::with_default_tol(f, spec.values(), n);
    let dim = spec.len();
    let flat = flatten(a);
    tuple_sum(opts.exec, dim, n, opts.budget, |idx, ws| {
        match cyclic_coefficient(&flat, dim, idx, opts.prune_below) {
            Some(c) if c.re != 0.0 || c.im != 0.0 => {
                let mut nodes = [0usize; MAX_THEOREM_ORDER];
                let nodes = &mut nodes[..n + 1];
                nodes[0] = idx[n - 1];
                nodes[1..].copy_from_slice(idx);
                Ok(c * eval.eval(nodes, ws)?)
            }
            _ => Ok(Complex64::new(0.0, 0.0)),
        }
    })
}

/// `Σ_k (-1)^k Σ_ε Σ_j w_j ⟨1, B_1, …, B_k⟩_k(t_j)` over multi-indices of
/// order `n`, with `B_i = {D, A}` for `ε_i = 0` and `A²` for `ε_i = 1`.
pub fn taylor_term_bracket_form(
    n: usize,
    spec: &Spectrum,
    a: &HermitianMatrix,
    f: &dyn SmoothFunction,
) -> Result<f64> {
    taylor_term_bracket_form_with(n, spec, a, f, &TermOptions::default()).map(|z| z.re)
}

pub fn taylor_term_bracket_form_with(
    n: usize,
    spec: &Spectrum,
    a: &HermitianMatrix,
    f: &dyn SmoothFunction,
    opts: &TermOptions,
) -> Result<Complex64> {
    check_dims(spec, a)?;
    let mu = f.laplace_measure().ok_or(Error::MissingMeasure)?;
    let unit = CMatrix::identity(spec.len(), spec.len());
    let anti = anticommutator_d(spec, a.matrix())?;
    let sq = a.square();
    let bopts = BracketOptions {
        exec: opts.exec,
        budget: opts.budget,
    };
    let mut total = Complex64::new(0.0, 0.0);
    for eps in epsilon_enumerate(n) {
        let mut ops = vec![&unit];
        ops.extend(eps.bits().iter().map(|&b| if b { &sq } else { &anti }));
        let sign = if eps.len() % 2 == 0 { 1.0 } else { -1.0 };
        for atom in mu.atoms() {
            total += bracket_dd_with(&ops, spec, atom.t, bopts)?.value * (sign * atom.w);
        }
    }
    Ok(total)
}

/// `(1/n) (1/2πi) ∮ f'(z) tr[A (z - D)^{-1}]^n dz` on a circle; at `n = 0`
/// the contour form of `tr f(D)`.
pub fn taylor_term_contour(
    n: usize,
    spec: &Spectrum,
    a: &HermitianMatrix,
    f: &dyn SmoothFunction,
    contour: &Contour,
) -> Result<f64> {
    check_dims(spec, a)?;
    contour.check_encloses(spec.values())?;
    let l = spec.values();
    let dim = spec.len();
    let value = contour.integrate(|z| {
        let resolvent: Vec<Complex64> = l.iter().map(|&li| (z - li).inv()).collect();
        if n == 0 {
            let fz = f.deriv_complex(0, z).ok_or(Error::NotAnalytic)?;
            return Ok(fz * resolvent.iter().sum::<Complex64>());
        }
        let dfz = f.deriv_complex(1, z).ok_or(Error::NotAnalytic)?;
        let m = CMatrix::from_fn(dim, dim, |i, j| a.entry(i, j) * resolvent[j]);
        let mut p = m.clone();
        for _ in 1..n {
            p = &p * &m;
        }
        Ok(dfz * p.trace())
    })?;
    Ok(if n == 0 { value.re } else { value.re / n as f64 })
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Default finite-difference step.
pub const DEFAULT_FD_STEP: f64 = 1.2;

/// `n`-th central difference of `u ↦ tr f(D + uA)` at 0, Richardson
/// Romberg extrapolated over `h / 2^l`, `l ≤ 4`, and divided by `n!`.
pub fn gateaux_fd(
    n: usize,
    spec: &Spectrum,
    a: &HermitianMatrix,
    f: &dyn SmoothFunction,
    h: f64,
) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::OutOfRange(format!("step h = {h} must be positive")));
    }
    check_dims(spec, a)?;
    let phi = |u: f64| action_exact(spec, &a.scaled(u), f);
    if n == 0 {
        return phi(0.0);
    }
    let central = |h: f64| -> Result<f64> {
        let mut acc = 0.0;
        for j in 0..=n {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * binomial(n, j) * phi((n as f64 / 2.0 - j as f64) * h)?;
        }
        Ok(acc / h.powi(n as i32))
    };
    Ok(romberg(central, h)? / factorial(n))
}

/// Mixed derivative `S^{(n)}(0)(A_1, …, A_n)` by a tensor central difference
/// Romberg extrapolated like [`gateaux_fd`] (not divided by `n!`).
pub fn gateaux_fd_mixed(
    spec: &Spectrum,
    dirs: &[&HermitianMatrix],
    f: &dyn SmoothFunction,
    h: f64,
) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::OutOfRange(format!("step h = {h} must be positive")));
    }
    for d in dirs {
        check_dims(spec, d)?;
    }
    let n = dirs.len();
    let zero = HermitianMatrix::zeros(spec.len());
    if n == 0 {
        return action_exact(spec, &zero, f);
    }
    let central = |h: f64| -> Result<f64> {
        let mut acc = 0.0;
        for mask in 0u32..(1 << n) {
            let mut m = zero.matrix().clone();
            let mut sign = 1.0;
            for (k, d) in dirs.iter().enumerate() {
                let s = if mask >> k & 1 == 1 { 1.0 } else { -1.0 };
                sign *= s;
                m += d.matrix() * Complex64::new(s * h / 2.0, 0.0);
            }
            acc += sign * action_exact(spec, &HermitianMatrix::new(m)?, f)?;
        }
        Ok(acc / h.powi(n as i32))
    };
    romberg(central, h)
}

/// Richardson extrapolation steps applied to the central differences.
pub const FD_ROMBERG_LEVELS: u32 = 4;

// Romberg table over steps h, h/2, …, h/2^L for an even error expansion in h
fn romberg(d: impl Fn(f64) -> Result<f64>, h: f64) -> Result<f64> {
    let levels = FD_ROMBERG_LEVELS as usize;
    let mut t = (0..=levels)
        .map(|l| d(h / f64::powi(2.0, l as i32)))
        .collect::<Result<Vec<_>>>()?;
    for k in 1..=levels {
        let p = f64::powi(4.0, k as i32);
        for l in (k..=levels).rev() {
            t[l] = (p * t[l] - t[l - 1]) / (p - 1.0);
        }
    }
    Ok(t[levels])
}
