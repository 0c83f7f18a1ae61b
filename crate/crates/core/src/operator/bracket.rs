//! The heat-kernel brackets
//! `⟨A_0, …, A_n⟩_n = t^n tr ∫_{Δ_n} A_0 e^{-s_0 t D²} ⋯ A_n e^{-s_n t D²} d^n s`.
//!
//! In the eigenbasis of `D` the simplex integral is a divided difference of
//! `E_t(u) = e^{-tu}` over squared eigenvalues, and `t^n` cancels against the
//! `(-t)^n` of `E_t^{(n)}`:
//! `⟨A_0, …, A_n⟩_n = (-1)^n Σ (A_0)_{i_0 i_1} ⋯ (A_n)_{i_n i_0} E_t[λ²_{i_0}, …, λ²_{i_n}]`.

use num_complex::Complex64;

use super::matrix::{check_dim, commutator_d, commutator_d2, CMatrix};
use super::Spectrum;
use crate::divdiff::ConfluentEvaluator;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::functions::Exponential;
use crate::simplex::{factorial, run_chunked, sample_uniform_simplex};
use crate::tuples::{tuple_sum, DEFAULT_TUPLE_BUDGET};

/// Value of a bracket of order `n` at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketValue {
    pub value: Complex64,
    pub order: usize,
    pub t: f64,
}

/// Monte Carlo estimate of a bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketEstimate {
    pub value: Complex64,
    /// Standard error of the complex estimate, `sqrt(se_re² + se_im²)`.
    pub stderr: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct BracketOptions {
    pub exec: Exec,
    pub budget: u64,
}

impl Default for BracketOptions {
    fn default() -> Self {
        Self {
            exec: Exec::default(),
            budget: DEFAULT_TUPLE_BUDGET,
        }
    }
}

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("t = {t} must be positive")))
    }
}

fn check_ops(ops: &[&CMatrix], spec: &Spectrum) -> Result<()> {
    if ops.is_empty() {
        return Err(Error::OutOfRange("bracket needs at least one argument".into()));
    }
    ops.iter().try_for_each(|a| check_dim(spec, a))
}

/// `tr e^{-t D²} = Σ_i e^{-t λ_i²}`.
pub fn heat_trace(spec: &Spectrum, t: f64) -> Result<f64> {
    check_t(t)?;
    Ok(spec.values().iter().map(|l| (-t * l * l).exp()).sum())
}

/// Closed-form bracket via divided differences of `e^{-tu}`.
pub fn bracket_dd(ops: &[&CMatrix], spec: &Spectrum, t: f64) -> Result<BracketValue> {
    bracket_dd_with(ops, spec, t, BracketOptions::default())
}

pub fn bracket_dd_with(
    ops: &[&CMatrix],
    spec: &Spectrum,
    t: f64,
    opts: BracketOptions,
) -> Result<BracketValue> {
    check_t(t)?;
    check_ops(ops, spec)?;
    let n = ops.len() - 1;
    let dim = spec.len();
    let heat = Exponential::new(1.0, -t);
    let eval = ConfluentEvaluator::with_default_tol(&heat, &spec.squares(), n);
    let flat: Vec<Vec<Complex64>> = ops
        .iter()
        .map(|a| (0..dim * dim).map(|k| a[(k / dim, k % dim)]).collect())
        .collect();
    let sum = tuple_sum(opts.exec, dim, n + 1, opts.budget, |idx, ws| {
        let mut coeff = Complex64::new(1.0, 0.0);
        for k in 0..=n {
            let next = if k == n { idx[0] } else { idx[k + 1] };
            coeff *= flat[k][idx[k] * dim + next];
            if coeff.re == 0.0 && coeff.im == 0.0 {
                return Ok(coeff);
            }
        }
        Ok(coeff * eval.eval(idx, ws)?)
    })?;
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(BracketValue {
        value: sum * sign,
        order: n,
        t,
    })
}

/// Monte Carlo over the simplex of `t^n tr(A_0 e^{-s_0 t D²} ⋯ A_n e^{-s_n t D²})`.
pub fn bracket_mc(
    ops: &[&CMatrix],
    spec: &Spectrum,
    t: f64,
    samples: u64,
    seed: u64,
) -> Result<BracketEstimate> {
    bracket_mc_with(ops, spec, t, samples, seed, Exec::default())
}

pub fn bracket_mc_with(
    ops: &[&CMatrix],
    spec: &Spectrum,
    t: f64,
    samples: u64,
    seed: u64,
    exec: Exec,
) -> Result<BracketEstimate> {
    check_t(t)?;
    check_ops(ops, spec)?;
    if samples == 0 {
        return Err(Error::OutOfRange("samples must be at least 1".into()));
    }
    let n = ops.len() - 1;
    let sq = spec.squares();
    if n == 0 {
        let value = (0..spec.len())
            .map(|i| ops[0][(i, i)] * (-t * sq[i]).exp())
            .sum();
        return Ok(BracketEstimate { value, stderr: 0.0 });
    }
    let [re, im] = run_chunked::<2, _, _, _>(
        exec,
        samples,
        seed,
        || (vec![0.0; n + 1], Vec::with_capacity(n)),
        |(s, work), rng| {
            sample_uniform_simplex(rng, s, work);
            let tr = weighted_product_trace(ops, &sq, t, s);
            [tr.re, tr.im]
        },
    );
    let scale = t.powi(n as i32) / factorial(n);
    Ok(BracketEstimate {
        value: Complex64::new(re.mean(), im.mean()) * scale,
        stderr: scale * (re.stderr().powi(2) + im.stderr().powi(2)).sqrt(),
    })
}

// tr(A_0 e^{-s_0 t D²} A_1 ⋯ A_n e^{-s_n t D²}) with D diagonal
fn weighted_product_trace(ops: &[&CMatrix], sq: &[f64], t: f64, s: &[f64]) -> Complex64 {
    let dim = sq.len();
    let mut p = ops[0].clone();
    scale_columns(&mut p, sq, t * s[0]);
    for (k, a) in ops.iter().enumerate().skip(1) {
        p = &p * *a;
        scale_columns(&mut p, sq, t * s[k]);
    }
    (0..dim).map(|i| p[(i, i)]).sum()
}

fn scale_columns(p: &mut CMatrix, sq: &[f64], ts: f64) {
    for (j, &u) in sq.iter().enumerate() {
        let w = (-ts * u).exp();
        for i in 0..p.nrows() {
            p[(i, j)] *= w;
        }
    }
}

/// One side-by-side comparison in a [`BracketIdentityReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityResidual {
    pub name: String,
    pub lhs: Complex64,
    pub rhs: Complex64,
    /// `|lhs - rhs|` over the largest of `|lhs|`, `|rhs|` and the summed
    /// magnitude of the individual terms.
    pub rel_err: f64,
}

impl IdentityResidual {
    fn new(name: String, lhs: Complex64, rhs: Complex64, term_scale: f64) -> Self {
        let diff = (lhs - rhs).norm();
        let denom = lhs.norm().max(rhs.norm()).max(term_scale);
        let rel_err = if diff == 0.0 { 0.0 } else { diff / denom };
        Self {
            name,
            lhs,
            rhs,
            rel_err,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BracketIdentityReport {
    pub checks: Vec<IdentityResidual>,
}

impl BracketIdentityReport {
    pub fn max_rel_err(&self) -> f64 {
        self.checks.iter().fold(0.0, |m, c| m.max(c.rel_err))
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.max_rel_err() <= tol
    }
}

fn rotated<'a>(ops: &[&'a CMatrix], r: usize) -> Vec<&'a CMatrix> {
    ops[r..].iter().chain(&ops[..r]).copied().collect()
}

/// Checks the bracket identities for `ops = (A_0, …, A_n)`:
///
/// 1. cyclic invariance `⟨A_0, …, A_n⟩ = ⟨A_r, …, A_{r-1}⟩`;
/// 2. unit insertion `t ⟨A_0, …, A_n⟩_n = Σ_i ⟨1, A_i, …, A_{i-1}⟩_{n+1}`;
/// 3. `Σ_i ⟨A_0, …, [D, A_i], …, A_n⟩_n = 0`;
/// 4. `⟨…, [D², A_i], …⟩_n = ⟨…, A_{i-1} A_i, …⟩_{n-1} - ⟨…, A_i A_{i+1}, …⟩_{n-1}`
///    (indices cyclic; only for `n ≥ 1`).
pub fn bracket_identity_check(
    ops: &[&CMatrix],
    spec: &Spectrum,
    t: f64,
) -> Result<BracketIdentityReport> {
    check_t(t)?;
    check_ops(ops, spec)?;
    let n = ops.len() - 1;
    let br = |list: &[&CMatrix]| bracket_dd(list, spec, t).map(|b| b.value);
    let base = br(ops)?;
    let mut checks = Vec::new();

    for r in 1..=n {
        let v = br(&rotated(ops, r))?;
        checks.push(IdentityResidual::new(format!("cyclic[{r}]"), base, v, 0.0));
    }

    let unit = CMatrix::identity(spec.len(), spec.len());
    let mut sum = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for i in 0..=n {
        let mut list = vec![&unit];
        list.extend(rotated(ops, i));
        let v = br(&list)?;
        sum += v;
        scale += v.norm();
    }
    checks.push(IdentityResidual::new("unit-insertion".into(), base * t, sum, scale));

    let comms: Vec<CMatrix> = ops
        .iter()
        .map(|a| commutator_d(spec, a))
        .collect::<Result<_>>()?;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for i in 0..=n {
        let mut list = ops.to_vec();
        list[i] = &comms[i];
        let v = br(&list)?;
        sum += v;
        scale += v.norm();
    }
    checks.push(IdentityResidual::new(
        "commutator-sum".into(),
        sum,
        Complex64::new(0.0, 0.0),
        scale,
    ));

    if n >= 1 {
        let wrap = ops[n] * ops[0];
        let wrapped: Vec<&CMatrix> = std::iter::once(&wrap).chain(ops[1..n].iter().copied()).collect();
        for i in 0..=n {
            let c2 = commutator_d2(spec, ops[i])?;
            let mut list = ops.to_vec();
            list[i] = &c2;
            let lhs = br(&list)?;

            let left_prod;
            let left = if i == 0 {
                br(&wrapped)?
            } else {
                left_prod = ops[i - 1] * ops[i];
                let mut l: Vec<&CMatrix> = ops[..i - 1].to_vec();
                l.push(&left_prod);
                l.extend(&ops[i + 1..]);
                br(&l)?
            };
            let right_prod;
            let right = if i == n {
                br(&wrapped)?
            } else {
                right_prod = ops[i] * ops[i + 1];
                let mut l: Vec<&CMatrix> = ops[..i].to_vec();
                l.push(&right_prod);
                l.extend(&ops[i + 2..]);
                br(&l)?
            };
            checks.push(IdentityResidual::new(
                format!("heat-commutator[{i}]"),
                lhs,
                left - right,
                left.norm() + right.norm(),
            ));
        }
    }
    Ok(BracketIdentityReport { checks })
}
