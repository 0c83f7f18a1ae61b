//! Numerical checks of the analytic estimates: the simplex weight integral
//! bound, the Hölder estimate of heat-kernel brackets and the Getzler–Szenes
//! heat-trace inequality.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::operator::{check_dim, eigen_decompose, heat_trace, CMatrix, HermitianMatrix, Spectrum};
use crate::simplex::{factorial, run_chunked, sample_uniform_simplex, DirichletSampler};

/// Outcome of one inequality check `lhs ≤ rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`.
    pub margin: f64,
    pub mc_stderr: Option<f64>,
    /// `lhs ≤ rhs + 3·stderr`.
    pub passed: bool,
}

impl BoundReport {
    pub fn new(lhs: f64, rhs: f64, mc_stderr: Option<f64>) -> Self {
        let slack = 3.0 * mc_stderr.unwrap_or(0.0);
        Self {
            lhs,
            rhs,
            margin: rhs - lhs,
            mc_stderr,
            passed: lhs <= rhs + slack,
        }
    }
}

/// Closed form of `∫_{Δ_m} (s_0 ⋯ s_{k−1})^{−1/2} d^m s`,
/// namely `π^{k/2} / Γ(m + 1 − k/2)`.
pub fn simplex_weight_integral(m: usize, k: usize) -> Result<f64> {
    check_simplex_args(m, k)?;
    let k = k as f64;
    Ok((0.5 * k * std::f64::consts::PI.ln() - ln_gamma(m as f64 + 1.0 - 0.5 * k)).exp())
}

/// The bound `π^k / (m − k)!`; at `k = m + 1` the factorial factor is 1.
pub fn simplex_bound(m: usize, k: usize) -> Result<f64> {
    check_simplex_args(m, k)?;
    Ok(std::f64::consts::PI.powi(k as i32) / factorial(m.saturating_sub(k)))
}

fn check_simplex_args(m: usize, k: usize) -> Result<()> {
    if k > m + 1 {
        return Err(Error::OutOfRange(format!("k = {k} exceeds m + 1 = {}", m + 1)));
    }
    Ok(())
}

/// Monte Carlo estimate of `∫_{Δ_m} (s_0 ⋯ s_{k−1})^{−1/2} d^m s`, importance
/// sampled from Dirichlet(1/2, …, 1/2, 1, …, 1), compared with
/// `π^k / (m − k)!`.
pub fn simplex_bound_check(m: usize, k: usize, samples: u64, seed: u64) -> Result<BoundReport> {
    simplex_bound_check_with(m, k, samples, seed, Exec::default())
}

pub fn simplex_bound_check_with(
    m: usize,
    k: usize,
    samples: u64,
    seed: u64,
    exec: Exec,
) -> Result<BoundReport> {
    let rhs = simplex_bound(m, k)?;
    if m == 0 {
        // the simplex is a single point with unit mass at s_0 = 1
        return Ok(BoundReport::new(1.0, rhs, Some(0.0)));
    }
    if samples == 0 {
        return Err(Error::OutOfRange("samples must be at least 1".into()));
    }
    let alphas: Vec<f64> = (0..=m).map(|i| if i < k { 0.5 } else { 1.0 }).collect();
    let sampler = DirichletSampler::new(&alphas)?;
    // 1 / normalising constant of the proposal, Γ(1/2)^k / Γ(m + 1 − k/2)
    let inv_norm = std::f64::consts::PI.sqrt().powi(k as i32) / gamma_half(2 * m + 2 - k);
    let [stats] = run_chunked::<1, _, _, _>(
        exec,
        samples,
        seed,
        || vec![0.0; m + 1],
        |s, rng| {
            sampler.sample(rng, s);
            // integrand over unnormalised proposal density
            let log_f = -0.5 * s[..k].iter().map(|x| x.ln()).sum::<f64>();
            let log_q = s
                .iter()
                .zip(&alphas)
                .map(|(&x, &a)| (a - 1.0) * x.ln())
                .sum::<f64>();
            [(log_f - log_q).exp() * inv_norm]
        },
    );
    Ok(BoundReport::new(stats.mean(), rhs, Some(stats.stderr())))
}

// Γ(j / 2) for j ≥ 1 by exact recurrences.
fn gamma_half(j: usize) -> f64 {
    if j.is_multiple_of(2) {
        factorial(j / 2 - 1)
    } else {
        (1..=(j - 1) / 2).fold(std::f64::consts::PI.sqrt(), |acc, i| acc * (i as f64 - 0.5))
    }
}

/// Inputs of the Hölder bracket estimate.
#[derive(Debug, Clone, Copy)]
pub struct HolderParams {
    pub t: f64,
    pub eps: f64,
    pub samples: u64,
    pub seed: u64,
}

/// Checks
/// `|∫_{Δ_n} tr(A_0 |D_A|^{α_0} e^{−s_0 t D_A²} A_1 |D|^{α_1} e^{−s_1 t D²} ⋯ A_n |D|^{α_n} e^{−s_n t D²}) d^n s|`
/// `≤ Π‖A_i‖ · tr e^{−(1−ε) t D²} / ((n − k)! (π^{−2} ε t)^{k/2})`
/// with `k = Σ α_i` and `D_A = D + A`. `perturbation` defaults to `A_0`.
pub fn holder_estimate_check(
    spec: &Spectrum,
    ops: &[&HermitianMatrix],
    alphas: &[u8],
    perturbation: Option<&HermitianMatrix>,
    params: HolderParams,
) -> Result<BoundReport> {
    holder_estimate_check_with(spec, ops, alphas, perturbation, params, Exec::default())
}

pub fn holder_estimate_check_with(
    spec: &Spectrum,
    ops: &[&HermitianMatrix],
    alphas: &[u8],
    perturbation: Option<&HermitianMatrix>,
    params: HolderParams,
    exec: Exec,
) -> Result<BoundReport> {
    let HolderParams { t, eps, samples, seed } = params;
    if ops.is_empty() {
        return Err(Error::OutOfRange("at least one operator is required".into()));
    }
    if alphas.len() != ops.len() {
        return Err(Error::DimensionMismatch {
            expected: ops.len(),
            got: alphas.len(),
        });
    }
    if alphas.iter().any(|&a| a > 1) {
        return Err(Error::OutOfRange("exponents must be 0 or 1".into()));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::OutOfRange(format!("t = {t} must be positive")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::OutOfRange(format!("eps = {eps} must lie in (0, 1)")));
    }
    if samples == 0 {
        return Err(Error::OutOfRange("samples must be at least 1".into()));
    }
    for op in ops {
        check_dim(spec, op.matrix())?;
    }
    let pert = perturbation.unwrap_or(ops[0]);
    check_dim(spec, pert.matrix())?;

    let n = ops.len() - 1;
    let k: usize = alphas.iter().map(|&a| a as usize).sum();
    let dim = spec.len();
    let vals = spec.values();
    let sq = spec.squares();
    let da = eigen_decompose(&HermitianMatrix::spectrum_plus(spec, pert)?)?;
    let mu = da.eigenvalues.values().to_vec();
    // A_0 U and U*, so slot 0 is A_0 U diag(·) U*
    let a0u = ops[0].matrix() * &da.eigenvectors;
    let uadj = da.eigenvectors.adjoint();
    let abs_pow = |x: f64, a: u8| if a == 0 { 1.0 } else { x.abs() };

    let trace_at = |s: &[f64]| -> Complex64 {
        let mut p = a0u.clone();
        for (j, &m) in mu.iter().enumerate() {
            let w = abs_pow(m, alphas[0]) * (-s[0] * t * m * m).exp();
            for i in 0..dim {
                p[(i, j)] *= w;
            }
        }
        let mut p: CMatrix = p * &uadj;
        for (slot, op) in ops.iter().enumerate().skip(1) {
            p = &p * op.matrix();
            for j in 0..dim {
                let w = abs_pow(vals[j], alphas[slot]) * (-s[slot] * t * sq[j]).exp();
                for i in 0..dim {
                    p[(i, j)] *= w;
                }
            }
        }
        (0..dim).map(|i| p[(i, i)]).sum()
    };

    let (value, stderr) = if n == 0 {
        (trace_at(&[1.0]), 0.0)
    } else {
        let [re, im] = run_chunked::<2, _, _, _>(
            exec,
            samples,
            seed,
            || (vec![0.0; n + 1], Vec::with_capacity(n)),
            |(s, work), rng| {
                sample_uniform_simplex(rng, s, work);
                let z = trace_at(s);
                [z.re, z.im]
            },
        );
        let vol = 1.0 / factorial(n);
        (
            Complex64::new(re.mean(), im.mean()) * vol,
            vol * (re.stderr().powi(2) + im.stderr().powi(2)).sqrt(),
        )
    };

    let norms = ops
        .iter()
        .map(|op| op.operator_norm())
        .collect::<Result<Vec<_>>>()?;
    let rhs = norms.iter().product::<f64>() * heat_trace(spec, (1.0 - eps) * t)?
        / (factorial(n.saturating_sub(k))
            * (eps * t / (std::f64::consts::PI * std::f64::consts::PI)).powf(0.5 * k as f64));
    Ok(BoundReport::new(value.norm(), rhs, Some(stderr)))
}

/// Checks `tr e^{−(1−ε/2) t (D+V)²} ≤ e^{(1+2/ε) t ‖V‖²} tr e^{−(1−ε) t D²}`.
pub fn getzler_szenes_check(
    spec: &Spectrum,
    v: &HermitianMatrix,
    t: f64,
    eps: f64,
) -> Result<BoundReport> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::OutOfRange(format!("t = {t} must be positive")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::OutOfRange(format!("eps = {eps} must lie in (0, 1)")));
    }
    let shifted = eigen_decompose(&HermitianMatrix::spectrum_plus(spec, v)?)?;
    let lhs = heat_trace(&shifted.eigenvalues, (1.0 - 0.5 * eps) * t)?;
    let norm = v.operator_norm()?;
    let rhs = ((1.0 + 2.0 / eps) * t * norm * norm).exp() * heat_trace(spec, (1.0 - eps) * t)?;
    Ok(BoundReport::new(lhs, rhs, None))
}
