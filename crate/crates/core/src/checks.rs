//! Randomised verification suites. Every suite compares independent routes
//! on seeded random instances and reports one [`CheckRow`] per comparison.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{getzler_szenes_check, holder_estimate_check, simplex_bound_check, HolderParams};
use crate::divdiff::{
    dd_chain_square, dd_contour, dd_derivative_sum, dd_hermite_mc, dd_of_derivative, dd_recursive,
    random_nodes, Contour, NodeList, DEFAULT_CONTOUR_POINTS,
};
use crate::error::{Error, Result};
use crate::functions::{GaussianMixture, SmoothFunction};
use crate::multi_index::{epsilon_enumerate, parent_moves};
use crate::operator::{bracket_identity_check, duhamel_residual, HermitianMatrix, Spectrum};
use crate::simplex::{factorial, seeded_rng};
use crate::spectral_action::{
    gateaux_fd, taylor_term, taylor_term_bracket_form, taylor_term_contour,
    taylor_term_theorem_form,
};

/// One comparison: `error ≤ tolerance` passes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub check: String,
    pub case: String,
    pub error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckRow {
    pub fn new(check: &str, case: String, error: f64, tolerance: f64) -> Self {
        Self {
            check: check.to_string(),
            case,
            error,
            tolerance,
            passed: error <= tolerance,
        }
    }
}

/// `|x − y| / max(|x|, |y|)`, zero when both vanish.
pub fn rel_diff(x: f64, y: f64) -> f64 {
    let d = (x - y).abs();
    if d == 0.0 {
        0.0
    } else {
        d / x.abs().max(y.abs())
    }
}

/// A random Gaussian mixture with 1 to 3 atoms, `t ∈ [0.25, 2]` and
/// `w ∈ [−1, 1]`.
pub fn random_mixture(rng: &mut ChaCha8Rng) -> Result<GaussianMixture> {
    let atoms: Vec<(f64, f64)> = (0..rng.random_range(1..=3))
        .map(|_| (rng.random_range(0.25..=2.0), rng.random_range(-1.0..=1.0)))
        .collect();
    GaussianMixture::new(&atoms)
}

fn mixture_label(f: &GaussianMixture) -> String {
    f.measure()
        .atoms()
        .iter()
        .map(|a| format!("{:.3}:{:.3}", a.t, a.w))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Random node sets and mixtures shared by the divided-difference suites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NodeSuite {
    pub instances: usize,
    pub max_nodes: usize,
    pub lo: f64,
    pub hi: f64,
    pub min_gap: f64,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for NodeSuite {
    fn default() -> Self {
        Self {
            instances: 200,
            max_nodes: 7,
            lo: -2.0,
            hi: 2.0,
            min_gap: 1e-3,
            seed: 1,
            tolerance: 1e-9,
        }
    }
}

impl NodeSuite {
    fn validate(&self) -> Result<()> {
        if self.max_nodes == 0 || !(self.lo < self.hi) || !(self.min_gap >= 0.0) {
            return Err(Error::OutOfRange(format!("invalid node suite {self:?}")));
        }
        let span = self.hi - self.lo;
        if self.min_gap * (self.max_nodes as f64 - 1.0) >= span {
            return Err(Error::OutOfRange("min_gap too large for the interval".into()));
        }
        Ok(())
    }

    // instance i: size cycles through 1..=max_nodes
    fn instance(&self, i: usize) -> Result<(GaussianMixture, NodeList, String)> {
        let mut rng = seeded_rng(self.seed, i as u64);
        let f = random_mixture(&mut rng)?;
        let size = 1 + i % self.max_nodes;
        let nodes = random_nodes(&mut rng, size, self.lo, self.hi, self.min_gap);
        let label = format!("#{i} n={} f=[{}]", size - 1, mixture_label(&f));
        Ok((f, NodeList::new(nodes)?, label))
    }
}

/// Parameters of the divided-difference triangle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TriangleSuite {
    pub nodes: NodeSuite,
    pub contour_margin: f64,
    pub contour_points: usize,
    pub mc_samples: u64,
    /// Allowed Monte Carlo deviation in standard errors.
    pub mc_sigmas: f64,
}

impl Default for TriangleSuite {
    fn default() -> Self {
        Self {
            nodes: NodeSuite {
                tolerance: 1e-8,
                ..NodeSuite::default()
            },
            contour_margin: 1.0,
            contour_points: DEFAULT_CONTOUR_POINTS,
            mc_samples: 100_000,
            mc_sigmas: 3.0,
        }
    }
}

/// `dd_recursive` against `dd_contour` (relative error) and against
/// `dd_hermite_mc` (deviation in standard errors).
pub fn divdiff_triangle(p: &TriangleSuite) -> Result<Vec<CheckRow>> {
    p.nodes.validate()?;
    let mut rows = Vec::with_capacity(2 * p.nodes.instances);
    for i in 0..p.nodes.instances {
        let (f, nodes, label) = p.nodes.instance(i)?;
        let exact = dd_recursive(&f, &nodes)?;
        let contour = Contour::enclosing(nodes.nodes(), p.contour_margin, p.contour_points);
        let via_contour = dd_contour(&f, &nodes, &contour)?;
        rows.push(CheckRow::new(
            "divdiff.recursive~contour",
            label.clone(),
            rel_diff(exact, via_contour),
            p.nodes.tolerance,
        ));
        let mc = dd_hermite_mc(&f, &nodes, p.mc_samples, p.nodes.seed ^ (i as u64) << 20)?;
        let dev = (mc.estimate - exact).abs();
        let sigmas = if dev == 0.0 { 0.0 } else { dev / mc.stderr };
        rows.push(CheckRow::new(
            "divdiff.recursive~hermite_mc",
            label,
            sigmas,
            p.mc_sigmas,
        ));
    }
    Ok(rows)
}

/// Chain rule for `f(x) = g(x²)` against the direct divided difference.
pub fn chain_square_suite(p: &NodeSuite) -> Result<Vec<CheckRow>> {
    p.validate()?;
    (0..p.instances)
        .map(|i| {
            let (f, nodes, label) = p.instance(i)?;
            let g = f.square_companion().ok_or(Error::MissingSquareCompanion)?;
            let chain = dd_chain_square(g, &nodes)?;
            let direct = dd_recursive(&f, &nodes)?;
            Ok(CheckRow::new("chain.square", label, rel_diff(chain, direct), p.tolerance))
        })
        .collect()
}

/// `Σ_i f[x_0, …, x_i, x_i, …, x_n] = f'[x_0, …, x_n]`.
pub fn derivative_sum_suite(p: &NodeSuite) -> Result<Vec<CheckRow>> {
    p.validate()?;
    (0..p.instances)
        .map(|i| {
            let (f, nodes, label) = p.instance(i)?;
            let sum = dd_derivative_sum(&f, &nodes)?;
            let direct = dd_of_derivative(&f, &nodes)?;
            Ok(CheckRow::new("derivative_sum", label, rel_diff(sum, direct), p.tolerance))
        })
        .collect()
}

/// Spectra used by the Taylor-term suites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SpectrumFamily {
    /// Independent uniform eigenvalues on `[−cutoff, cutoff]`, reseeded per
    /// instance.
    RandomUniform { cutoff: f64 },
    /// `±(k + 1/2)`: squares with multiplicity two.
    DiracCircle,
    /// `±(k + 1/2)` with every eigenvalue repeated.
    RepeatedDirac { multiplicity: usize },
}

impl SpectrumFamily {
    pub fn build(&self, dim: usize, seed: u64) -> Result<Spectrum> {
        match *self {
            SpectrumFamily::RandomUniform { cutoff } => Spectrum::random_uniform(dim, cutoff, seed),
            SpectrumFamily::DiracCircle => Spectrum::dirac_circle(dim),
            SpectrumFamily::RepeatedDirac { multiplicity } => {
                let m = multiplicity.max(1);
                Spectrum::with_multiplicity(&Spectrum::dirac_circle(dim.div_ceil(m))?, m, dim)
            }
        }
    }

    fn label(&self) -> &'static str {
        match self {
            SpectrumFamily::RandomUniform { .. } => "random",
            SpectrumFamily::DiracCircle => "dirac",
            SpectrumFamily::RepeatedDirac { .. } => "repeated",
        }
    }
}

/// Parameters of the Taylor-term route agreement suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RouteSuite {
    pub dims: Vec<usize>,
    pub orders: Vec<usize>,
    pub instances: usize,
    pub spectrum: SpectrumFamily,
    /// Operator norm of the random perturbations.
    pub norm: f64,
    /// Laplace atoms `(t, w)` of the Gaussian mixture.
    pub atoms: Vec<(f64, f64)>,
    pub seed: u64,
    pub analytic_tolerance: f64,
    pub fd_tolerance: f64,
    pub fd_step: f64,
    pub contour_margin: f64,
    pub contour_points: usize,
}

impl Default for RouteSuite {
    fn default() -> Self {
        Self {
            dims: (2..=6).collect(),
            orders: (1..=5).collect(),
            instances: 50,
            spectrum: SpectrumFamily::RandomUniform { cutoff: 1.5 },
            norm: 0.5,
            atoms: vec![(1.0, 1.0), (0.5, -0.4)],
            seed: 1,
            analytic_tolerance: 1e-8,
            fd_tolerance: 1e-4,
            fd_step: crate::spectral_action::DEFAULT_FD_STEP,
            contour_margin: 1.0,
            contour_points: DEFAULT_CONTOUR_POINTS,
        }
    }
}

/// Per instance: the largest pairwise relative difference of the divided
/// difference, theorem, bracket and contour forms, and the relative error of
/// the finite-difference oracle against the divided-difference form.
pub fn route_agreement(p: &RouteSuite) -> Result<Vec<CheckRow>> {
    let f = GaussianMixture::new(&p.atoms)?;
    let mut rows = Vec::new();
    for &dim in &p.dims {
        for inst in 0..p.instances {
            let seed = p.seed.wrapping_mul(1_000_003).wrapping_add((dim * 10_000 + inst) as u64);
            let spec = p.spectrum.build(dim, seed)?;
            let a = HermitianMatrix::random(dim, p.norm, seed ^ 0x5eed)?;
            let contour = Contour::enclosing(spec.values(), p.contour_margin, p.contour_points);
            for &n in &p.orders {
                let label = format!("{} N={dim} n={n} #{inst}", p.spectrum.label());
                let values = [
                    taylor_term(n, &spec, &a, &f)?,
                    taylor_term_theorem_form(n, &spec, &a, &f)?,
                    taylor_term_bracket_form(n, &spec, &a, &f)?,
                    taylor_term_contour(n, &spec, &a, &f, &contour)?,
                ];
                let mut worst: f64 = 0.0;
                for i in 0..values.len() {
                    for j in i + 1..values.len() {
                        worst = worst.max(rel_diff(values[i], values[j]));
                    }
                }
                rows.push(CheckRow::new(
                    "taylor.analytic_routes",
                    label.clone(),
                    worst,
                    p.analytic_tolerance,
                ));
                let fd = gateaux_fd(n, &spec, &a, &f, p.fd_step)?;
                rows.push(CheckRow::new(
                    "taylor.fd_oracle",
                    label,
                    rel_diff(fd, values[0]),
                    p.fd_tolerance,
                ));
            }
        }
    }
    Ok(rows)
}

/// Parameters of the bracket identity suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BracketSuite {
    pub instances: usize,
    pub max_dim: usize,
    pub max_order: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for BracketSuite {
    fn default() -> Self {
        Self {
            instances: 100,
            max_dim: 4,
            max_order: 3,
            t_min: 0.1,
            t_max: 2.0,
            seed: 1,
            tolerance: 1e-9,
        }
    }
}

/// Cyclicity, unit insertion and the two commutator identities of the
/// heat-kernel brackets on random Hermitian arguments and spectra.
pub fn bracket_identities(p: &BracketSuite) -> Result<Vec<CheckRow>> {
    if p.max_dim == 0 || !(p.t_min > 0.0 && p.t_min <= p.t_max) {
        return Err(Error::OutOfRange(format!("invalid bracket suite {p:?}")));
    }
    let mut rows = Vec::with_capacity(p.instances);
    for i in 0..p.instances {
        let mut rng = seeded_rng(p.seed, i as u64);
        let dim = rng.random_range(1..=p.max_dim);
        let n = rng.random_range(0..=p.max_order);
        let t = rng.random_range(p.t_min..=p.t_max);
        let spec = Spectrum::random_uniform(dim, 2.0, rng.random())?;
        let mats = (0..=n)
            .map(|_| HermitianMatrix::random(dim, rng.random_range(0.2..=1.5), rng.random()))
            .collect::<Result<Vec<_>>>()?;
        let ops: Vec<_> = mats.iter().map(|m| m.matrix()).collect();
        let report = bracket_identity_check(&ops, &spec, t)?;
        rows.push(CheckRow::new(
            "bracket.identities",
            format!("#{i} N={dim} n={n} t={t:.3}"),
            report.max_rel_err(),
            p.tolerance,
        ));
    }
    Ok(rows)
}

/// Parameters of the Duhamel residual suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DuhamelSuite {
    pub instances: usize,
    pub max_dim: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub quad_points: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for DuhamelSuite {
    fn default() -> Self {
        Self {
            instances: 50,
            max_dim: 5,
            t_min: 0.1,
            t_max: 2.0,
            quad_points: crate::operator::DEFAULT_QUAD_POINTS,
            seed: 1,
            tolerance: 1e-8,
        }
    }
}

pub fn duhamel_suite(p: &DuhamelSuite) -> Result<Vec<CheckRow>> {
    if p.max_dim == 0 || !(p.t_min > 0.0 && p.t_min <= p.t_max) {
        return Err(Error::OutOfRange(format!("invalid Duhamel suite {p:?}")));
    }
    let mut rows = Vec::with_capacity(p.instances);
    for i in 0..p.instances {
        let mut rng = seeded_rng(p.seed, i as u64);
        let dim = rng.random_range(1..=p.max_dim);
        let t = rng.random_range(p.t_min..=p.t_max);
        let spec = Spectrum::random_uniform(dim, 2.0, rng.random())?;
        let a = HermitianMatrix::random(dim, rng.random_range(0.1..=1.0), rng.random())?;
        let r = duhamel_residual(&spec, &a, t, p.quad_points)?;
        rows.push(CheckRow::new(
            "duhamel.residual",
            format!("#{i} N={dim} t={t:.3}"),
            r,
            p.tolerance,
        ));
    }
    Ok(rows)
}

/// Every bitstring of order `n + 1` arises from exactly `n + 1` moves out of
/// order-`n` bitstrings; the row error is the number of violations.
pub fn epsilon_combinatorics(max_order: usize) -> Vec<CheckRow> {
    (0..=max_order)
        .map(|n| {
            let children = epsilon_enumerate(n + 1);
            let bad = children.iter().filter(|c| parent_moves(c) != n + 1).count();
            CheckRow::new(
                "epsilon.parent_moves",
                format!("order {} ({} strings)", n + 1, children.len()),
                bad as f64,
                0.0,
            )
        })
        .collect()
}

/// Parameters of the simplex bound suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimplexSuite {
    pub max_m: usize,
    pub max_k: usize,
    pub samples: u64,
    pub seed: u64,
}

impl Default for SimplexSuite {
    fn default() -> Self {
        Self {
            max_m: 8,
            max_k: 4,
            samples: 1_000_000,
            seed: 1,
        }
    }
}

/// A labelled [`BoundReport`](crate::bounds::BoundReport).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub check: String,
    pub case: String,
    pub report: crate::bounds::BoundReport,
}

/// `∫(s_0 ⋯ s_{k−1})^{−1/2} ≤ π^k/(m−k)!` for `m ≤ max_m`,
/// `k ≤ min(m + 1, max_k)`, plus the equality `1/m!` at `k = 0`.
pub fn simplex_suite(p: &SimplexSuite) -> Result<Vec<BoundRow>> {
    let mut rows = Vec::new();
    for m in 0..=p.max_m {
        for k in 0..=p.max_k.min(m + 1) {
            let report = simplex_bound_check(m, k, p.samples, p.seed.wrapping_add((m * 16 + k) as u64))?;
            rows.push(BoundRow {
                check: "simplex.bound".into(),
                case: format!("m={m} k={k}"),
                report,
            });
            if k == 0 {
                let exact = 1.0 / factorial(m);
                let se = report.mc_stderr.unwrap_or(0.0);
                rows.push(BoundRow {
                    check: "simplex.volume".into(),
                    case: format!("m={m}"),
                    report: crate::bounds::BoundReport {
                        lhs: (report.lhs - exact).abs(),
                        rhs: 3.0 * se,
                        margin: 3.0 * se - (report.lhs - exact).abs(),
                        mc_stderr: report.mc_stderr,
                        passed: (report.lhs - exact).abs() <= 3.0 * se,
                    },
                });
            }
        }
    }
    Ok(rows)
}

/// Parameters of the Getzler–Szenes suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GetzlerSuite {
    pub instances: usize,
    pub max_dim: usize,
    pub max_norm: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub eps: Vec<f64>,
    pub cutoff: f64,
    pub seed: u64,
}

impl Default for GetzlerSuite {
    fn default() -> Self {
        Self {
            instances: 100,
            max_dim: 8,
            max_norm: 2.0,
            t_min: 0.1,
            t_max: 3.0,
            eps: vec![0.1, 0.5, 0.9],
            cutoff: 3.0,
            seed: 1,
        }
    }
}

pub fn getzler_suite(p: &GetzlerSuite) -> Result<Vec<BoundRow>> {
    if p.eps.is_empty() || p.max_dim == 0 || !(p.max_norm > 0.0) {
        return Err(Error::OutOfRange(format!("invalid Getzler–Szenes suite {p:?}")));
    }
    let mut rows = Vec::with_capacity(p.instances);
    for i in 0..p.instances {
        let mut rng = seeded_rng(p.seed, i as u64);
        let dim = rng.random_range(1..=p.max_dim);
        let norm = p.max_norm * (1.0 - rng.random::<f64>());
        let t = rng.random_range(p.t_min..=p.t_max);
        let eps = p.eps[i % p.eps.len()];
        let spec = Spectrum::random_uniform(dim, p.cutoff, rng.random())?;
        let v = HermitianMatrix::random(dim, norm, rng.random())?;
        rows.push(BoundRow {
            check: "getzler_szenes".into(),
            case: format!("#{i} N={dim} |V|={norm:.3} t={t:.3} eps={eps}"),
            report: getzler_szenes_check(&spec, &v, t, eps)?,
        });
    }
    Ok(rows)
}

/// Parameters of the Hölder bracket estimate suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HolderSuite {
    pub instances: usize,
    pub max_dim: usize,
    pub max_order: usize,
    pub norm: f64,
    pub t: f64,
    pub eps: f64,
    pub samples: u64,
    pub seed: u64,
}

impl Default for HolderSuite {
    fn default() -> Self {
        Self {
            instances: 20,
            max_dim: 4,
            max_order: 2,
            norm: 0.5,
            t: 1.0,
            eps: 0.5,
            samples: 20_000,
            seed: 1,
        }
    }
}

pub fn holder_suite(p: &HolderSuite) -> Result<Vec<BoundRow>> {
    if p.max_dim == 0 || !(p.norm > 0.0) {
        return Err(Error::OutOfRange(format!("invalid Hölder suite {p:?}")));
    }
    let mut rows = Vec::with_capacity(p.instances);
    for i in 0..p.instances {
        let mut rng = seeded_rng(p.seed, i as u64);
        let dim = rng.random_range(1..=p.max_dim);
        let n = rng.random_range(0..=p.max_order);
        let spec = Spectrum::random_uniform(dim, 2.0, rng.random())?;
        let mats = (0..=n)
            .map(|_| HermitianMatrix::random(dim, p.norm, rng.random()))
            .collect::<Result<Vec<_>>>()?;
        let ops: Vec<_> = mats.iter().collect();
        let alphas: Vec<u8> = (0..=n).map(|_| rng.random_range(0..=1u8)).collect();
        let params = HolderParams {
            t: p.t,
            eps: p.eps,
            samples: p.samples,
            seed: rng.random(),
        };
        let alpha_label: String = alphas.iter().map(|a| a.to_string()).collect();
        rows.push(BoundRow {
            check: "holder".into(),
            case: format!("#{i} N={dim} n={n} alpha={alpha_label}"),
            report: holder_estimate_check(&spec, &ops, &alphas, None, params)?,
        });
    }
    Ok(rows)
}
