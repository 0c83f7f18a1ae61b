//! Divided differences `f[x_0, …, x_n]`.
//!
//! The primary route is the confluent Newton table: nodes are clustered at a
//! merge tolerance, sorted, and a block of `m` coincident nodes contributes
//! `f^{(m-1)}(x)/(m-1)!`. Independent routes are the Hermite simplex integral
//! (Monte Carlo), the Cauchy contour integral, and the chain rules for
//! `f = g ∘ φ`.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::functions::{require_order, Derivative, SmoothFunction};
use crate::multi_index::epsilon_enumerate;
use crate::simplex::{factorial, run_chunked, sample_uniform_simplex, McEstimate};

/// Relative merge tolerance: nodes within `1e-8 · (1 + max|x_i|)` coincide.
pub const DEFAULT_MERGE_REL: f64 = 1e-8;

/// A group of nodes treated as one confluent node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cluster {
    pub value: f64,
    pub multiplicity: usize,
}

/// An ordered list of interpolation nodes, repetitions allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeList {
    nodes: Vec<f64>,
    merge_tol: f64,
}

impl NodeList {
    /// Nodes with the default merge tolerance.
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        let scale = nodes.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        Self::with_merge_tol(nodes, DEFAULT_MERGE_REL * (1.0 + scale))
    }

    pub fn with_merge_tol(nodes: Vec<f64>, merge_tol: f64) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::EmptyNodes);
        }
        if let Some(&x) = nodes.iter().find(|x| !x.is_finite()) {
            return Err(Error::NonFiniteNode(x));
        }
        if !(merge_tol >= 0.0 && merge_tol.is_finite()) {
            return Err(Error::OutOfRange(format!("merge_tol = {merge_tol}")));
        }
        Ok(Self { nodes, merge_tol })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn merge_tol(&self) -> f64 {
        self.merge_tol
    }

    /// Order `n` of the difference (number of nodes minus one).
    pub fn order(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Clusters in ascending order of their mean value.
    pub fn clusters(&self) -> Vec<Cluster> {
        let c = Clustering::new(&self.nodes, self.merge_tol);
        c.reps
            .iter()
            .zip(&c.mult)
            .map(|(&value, &multiplicity)| Cluster {
                value,
                multiplicity,
            })
            .collect()
    }

    /// Largest distance from a node to its cluster mean.
    pub fn max_displacement(&self) -> f64 {
        let c = Clustering::new(&self.nodes, self.merge_tol);
        self.nodes
            .iter()
            .zip(&c.cluster_of)
            .map(|(&x, &id)| (x - c.reps[id]).abs())
            .fold(0.0, f64::max)
    }
}

/// Single-linkage clustering of points; cluster ids increase with value.
#[derive(Debug, Clone)]
struct Clustering {
    reps: Vec<f64>,
    mult: Vec<usize>,
    cluster_of: Vec<usize>,
}

impl Clustering {
    fn new(points: &[f64], tol: f64) -> Self {
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| points[a].total_cmp(&points[b]));
        let mut cluster_of = vec![0; points.len()];
        let mut sums: Vec<f64> = Vec::new();
        let mut mult: Vec<usize> = Vec::new();
        let mut prev = f64::NEG_INFINITY;
        for &i in &order {
            let x = points[i];
            if sums.is_empty() || x - prev > tol {
                sums.push(0.0);
                mult.push(0);
            }
            let id = sums.len() - 1;
            sums[id] += x;
            mult[id] += 1;
            cluster_of[i] = id;
            prev = x;
        }
        let reps = sums.iter().zip(&mult).map(|(s, &m)| s / m as f64).collect();
        Self {
            reps,
            mult,
            cluster_of,
        }
    }
}

/// Distinct clusters closer than this are evaluated by a Taylor expansion
/// about their common centre instead of Newton quotients.
pub const CLOSE_GAP: f64 = 0.1;

/// Maximal number of Taylor terms beyond the order of an entry.
const TAYLOR_TERMS: usize = 64;

/// Scratch buffers for [`ConfluentEvaluator::eval`].
#[derive(Debug, Default, Clone)]
pub struct Workspace {
    ids: Vec<usize>,
    table: Vec<f64>,
    close: Vec<f64>,
    powers: Vec<f64>,
}

// Clusters chained by gaps below `CLOSE_GAP`, with Taylor coefficients of f
// about the midpoint of the chain.
#[derive(Debug, Clone)]
struct CloseGroup {
    center: f64,
    coeffs: Vec<f64>,
}

/// Divided differences of a fixed function over index tuples drawn from a
/// fixed point set, with the Taylor coefficients `f^{(k)}(x)/k!` cached per
/// clustered point.
///
/// Confluent blocks use the cached coefficients, well separated nodes the
/// Newton quotients, and blocks of distinct nodes closer than
/// [`CLOSE_GAP`] a Taylor series about the block centre, which avoids the
/// `ε / gap^m` cancellation of the quotients.
#[derive(Debug, Clone)]
pub struct ConfluentEvaluator {
    clustering: Clustering,
    // coeffs[c * (order + 1) + k] = f^{(k)}(rep_c) / k!
    coeffs: Vec<f64>,
    order: usize,
    group_of: Vec<Option<usize>>,
    groups: Vec<CloseGroup>,
}

impl ConfluentEvaluator {
    /// Caches derivatives up to `order` (capped at `f.max_order()`), where
    /// `order + 1` is the longest tuple to be evaluated.
    pub fn new(f: &dyn SmoothFunction, points: &[f64], merge_tol: f64, order: usize) -> Self {
        let clustering = Clustering::new(points, merge_tol);
        let full_order = order;
        let order = order.min(f.max_order());
        let mut coeffs = Vec::with_capacity(clustering.reps.len() * (order + 1));
        for &x in &clustering.reps {
            for k in 0..=order {
                coeffs.push(f.deriv(k, x) / factorial(k));
            }
        }
        let (group_of, groups) = close_groups(f, &clustering.reps, full_order);
        Self {
            clustering,
            coeffs,
            order,
            group_of,
            groups,
        }
    }

    /// Evaluator over `points` with the default merge tolerance.
    pub fn with_default_tol(f: &dyn SmoothFunction, points: &[f64], order: usize) -> Self {
        let scale = points.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        Self::new(f, points, DEFAULT_MERGE_REL * (1.0 + scale), order)
    }

    pub fn cluster_count(&self) -> usize {
        self.clustering.reps.len()
    }

    /// `f[p_{i_0}, …, p_{i_n}]` for point indices `ids`.
    pub fn eval(&self, ids: &[usize], ws: &mut Workspace) -> Result<f64> {
        ws.ids.clear();
        ws.ids
            .extend(ids.iter().map(|&i| self.clustering.cluster_of[i]));
        ws.ids.sort_unstable();
        let has_close = ws.ids.windows(2).any(|w| {
            w[0] != w[1] && self.group_of[w[0]].is_some() && self.group_of[w[0]] == self.group_of[w[1]]
        });
        if !has_close {
            return newton_confluent(
                &self.clustering.reps,
                &ws.ids,
                &mut ws.table,
                &self.coeffs,
                self.order,
            );
        }
        self.newton_with_close_blocks(ws)
    }

    fn newton_with_close_blocks(&self, ws: &mut Workspace) -> Result<f64> {
        let Workspace {
            ids,
            table: c,
            close,
            powers,
        } = ws;
        let reps = &self.clustering.reps;
        let stride = self.order + 1;
        let n = ids.len() - 1;
        let len = n + 1;
        // close[a * len + b] = f[x_a, …, x_b] for a < b inside one group
        close.clear();
        close.resize(len * len, f64::NAN);
        let mut start = 0;
        while start <= n {
            let g = self.group_of[ids[start]];
            let mut end = start;
            while end < n && g.is_some() && self.group_of[ids[end + 1]] == g {
                end += 1;
            }
            if let Some(g) = g {
                if ids[start] != ids[end] {
                    let group = &self.groups[g];
                    for a in start..end {
                        taylor_row(group, reps, &ids[a..=end], powers, &mut close[a * len + a..a * len + end + 1]);
                    }
                }
            }
            start = end + 1;
        }
        c.clear();
        c.extend(ids.iter().map(|&id| self.coeffs[id * stride]));
        for j in 1..=n {
            for i in (j..=n).rev() {
                if ids[i] == ids[i - j] {
                    if j > self.order {
                        return Err(Error::InsufficientOrder {
                            required: j,
                            available: self.order,
                        });
                    }
                    c[i] = self.coeffs[ids[i] * stride + j];
                } else {
                    let t = close[(i - j) * len + i];
                    c[i] = if t.is_nan() {
                        (c[i] - c[i - 1]) / (reps[ids[i]] - reps[ids[i - j]])
                    } else {
                        t
                    };
                }
            }
        }
        Ok(c[n])
    }
}

fn close_groups(
    f: &dyn SmoothFunction,
    reps: &[f64],
    order: usize,
) -> (Vec<Option<usize>>, Vec<CloseGroup>) {
    let mut group_of = vec![None; reps.len()];
    let mut groups = Vec::new();
    let taylor_order = order.saturating_add(TAYLOR_TERMS);
    if reps.len() < 2 || order == 0 || f.max_order() < taylor_order {
        return (group_of, groups);
    }
    let mut start = 0;
    while start < reps.len() {
        let mut end = start;
        while end + 1 < reps.len() && reps[end + 1] - reps[end] < CLOSE_GAP {
            end += 1;
        }
        if end > start {
            let center = 0.5 * (reps[start] + reps[end]);
            let coeffs = (0..=taylor_order)
                .map(|k| f.deriv(k, center) / factorial(k))
                .collect();
            let g = groups.len();
            groups.push(CloseGroup { center, coeffs });
            group_of[start..=end].iter_mut().for_each(|x| *x = Some(g));
        }
        start = end + 1;
    }
    (group_of, groups)
}

// Fills out[m] = f[x_0, …, x_m] for m ≥ 1 (x = reps[ids]) from
// f[x_0, …, x_m] = Σ_{k ≥ m} a_k h_{k−m}(x_0 − c, …, x_m − c), with h_j the
// complete homogeneous symmetric polynomials. Entries whose series does not
// settle are left as NaN for the Newton quotient.
fn taylor_row(group: &CloseGroup, reps: &[f64], ids: &[usize], h: &mut Vec<f64>, out: &mut [f64]) {
    h.clear();
    h.resize(TAYLOR_TERMS + 1, 0.0);
    h[0] = 1.0;
    for (m, &id) in ids.iter().enumerate() {
        let y = reps[id] - group.center;
        for j in 1..=TAYLOR_TERMS {
            h[j] += y * h[j - 1];
        }
        if m == 0 || ids[m] == ids[0] {
            continue;
        }
        let mut acc = 0.0;
        let mut small = 0;
        let mut settled = false;
        for (j, hj) in h.iter().enumerate() {
            let term = group.coeffs[m + j] * hj;
            acc += term;
            if term.abs() <= 1e-18 * acc.abs() {
                small += 1;
                if small == 3 {
                    settled = true;
                    break;
                }
            } else {
                small = 0;
            }
        }
        if settled {
            out[m] = acc;
        }
    }
}

// Confluent Newton table over sorted cluster ids. Coincident ids are
// contiguous, so a block whose end points share an id is fully confluent.
fn newton_confluent(
    reps: &[f64],
    ids: &[usize],
    c: &mut Vec<f64>,
    coeffs: &[f64],
    order: usize,
) -> Result<f64> {
    let stride = order + 1;
    let n = ids.len() - 1;
    c.clear();
    c.extend(ids.iter().map(|&id| coeffs[id * stride]));
    for j in 1..=n {
        for i in (j..=n).rev() {
            if ids[i] == ids[i - j] {
                if j > order {
                    return Err(Error::InsufficientOrder {
                        required: j,
                        available: order,
                    });
                }
                c[i] = coeffs[ids[i] * stride + j];
            } else {
                c[i] = (c[i] - c[i - 1]) / (reps[ids[i]] - reps[ids[i - j]]);
            }
        }
    }
    Ok(c[n])
}

fn max_multiplicity(nodes: &NodeList) -> usize {
    nodes
        .clusters()
        .iter()
        .map(|c| c.multiplicity)
        .max()
        .unwrap_or(1)
}

/// `f[x_0, …, x_n]` by the confluent Newton recursion.
pub fn dd_recursive(f: &dyn SmoothFunction, nodes: &NodeList) -> Result<f64> {
    let needed = max_multiplicity(nodes) - 1;
    require_order(f, needed)?;
    let eval = ConfluentEvaluator::new(f, nodes.nodes(), nodes.merge_tol(), nodes.order());
    let ids: Vec<usize> = (0..nodes.nodes().len()).collect();
    eval.eval(&ids, &mut Workspace::default())
}

/// Monte Carlo estimate of the Hermite integral
/// `∫_{Δ_n} f^{(n)}(Σ s_i x_i) d^n s` with uniform simplex samples.
pub fn dd_hermite_mc(
    f: &dyn SmoothFunction,
    nodes: &NodeList,
    samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    dd_hermite_mc_with(f, nodes, samples, seed, Exec::default())
}

pub fn dd_hermite_mc_with(
    f: &dyn SmoothFunction,
    nodes: &NodeList,
    samples: u64,
    seed: u64,
    exec: Exec,
) -> Result<McEstimate> {
    let n = nodes.order();
    require_order(f, n)?;
    if samples == 0 {
        return Err(Error::OutOfRange("samples must be at least 1".into()));
    }
    let x = nodes.nodes();
    if n == 0 {
        return Ok(McEstimate {
            estimate: f.eval(x[0]),
            stderr: 0.0,
            samples,
        });
    }
    let [stats] = run_chunked::<1, _, _, _>(
        exec,
        samples,
        seed,
        || (vec![0.0; n + 1], Vec::with_capacity(n)),
        |(s, work), rng| {
            sample_uniform_simplex(rng, s, work);
            let point: f64 = s.iter().zip(x).map(|(a, b)| a * b).sum();
            [f.deriv(n, point)]
        },
    );
    let vol = 1.0 / factorial(n);
    Ok(McEstimate {
        estimate: stats.mean() * vol,
        stderr: stats.stderr() * vol,
        samples,
    })
}

/// An ellipse `center + radius · cos θ + i · semi_minor · sin θ` sampled at
/// `points` equispaced angles; a circle when `semi_minor == radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contour {
    pub center: f64,
    /// Semi-axis along the real line.
    pub radius: f64,
    /// Semi-axis along the imaginary direction.
    pub semi_minor: f64,
    pub points: usize,
}

/// Default number of trapezoid points on a contour.
pub const DEFAULT_CONTOUR_POINTS: usize = 512;

impl Contour {
    /// A circle.
    pub fn new(center: f64, radius: f64, points: usize) -> Self {
        Self::ellipse(center, radius, radius, points)
    }

    pub fn ellipse(center: f64, radius: f64, semi_minor: f64, points: usize) -> Self {
        Self {
            center,
            radius,
            semi_minor,
            points,
        }
    }

    /// The ellipse around the midpoint of `values` whose real semi-axis
    /// exceeds the half-span by `margin` and whose imaginary semi-axis is
    /// `margin`. Staying close to the real axis keeps Gaussian integrands
    /// bounded by `e^{t · margin²}`.
    pub fn enclosing(values: &[f64], margin: f64, points: usize) -> Self {
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self::ellipse(0.5 * (lo + hi), 0.5 * (hi - lo) + margin, margin, points)
    }

    /// Fails unless every value lies strictly inside the contour.
    pub fn check_encloses(&self, values: &[f64]) -> Result<()> {
        if self.points == 0 || !(self.radius > 0.0 && self.semi_minor > 0.0) {
            return Err(Error::OutOfRange(format!(
                "contour needs positive semi-axes and points, got {} / {} / {}",
                self.radius, self.semi_minor, self.points
            )));
        }
        for &x in values {
            if !((x - self.center).abs() < self.radius) {
                return Err(Error::OutsideContour {
                    node: x,
                    center: self.center,
                    radius: self.radius,
                });
            }
        }
        Ok(())
    }

    /// Trapezoid rule for `(1/2πi) ∮ h(z) dz`.
    pub fn integrate<H>(&self, mut h: H) -> Result<Complex64>
    where
        H: FnMut(Complex64) -> Result<Complex64>,
    {
        let m = self.points as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..self.points {
            let (sin, cos) = (std::f64::consts::TAU * k as f64 / m).sin_cos();
            let z = Complex64::new(self.center + self.radius * cos, self.semi_minor * sin);
            // dz / (i dθ)
            let jac = Complex64::new(self.semi_minor * cos, self.radius * sin);
            acc += h(z)? * jac;
        }
        Ok(acc / m)
    }
}

/// Cauchy's formula `(1/2πi) ∮ g(z) / Π (z - x_i) dz` on a circle.
pub fn dd_contour(g: &dyn SmoothFunction, nodes: &NodeList, contour: &Contour) -> Result<f64> {
    let x = nodes.nodes();
    contour.check_encloses(x)?;
    let value = contour.integrate(|z| {
        let gz = g.deriv_complex(0, z).ok_or(Error::NotAnalytic)?;
        let denom = x.iter().fold(Complex64::new(1.0, 0.0), |p, &xi| p * (z - xi));
        Ok(gz / denom)
    })?;
    Ok(value.re)
}

/// `f[x_0, …, x_n]` for `f(x) = g(x²)`, summing over index sets with steps
/// of 1 (weight `x_a + x_b`) or 2 (weight 1), realised as ε-bitstrings.
pub fn dd_chain_square(g: &dyn SmoothFunction, nodes: &NodeList) -> Result<f64> {
    let x = nodes.nodes();
    let n = nodes.order();
    let mut total = 0.0;
    for eps in epsilon_enumerate(n) {
        let set = eps.index_set();
        let weight: f64 = set
            .windows(2)
            .filter(|w| w[1] - w[0] == 1)
            .map(|w| x[w[0]] + x[w[1]])
            .product();
        let squares = NodeList::new(set.iter().map(|&i| x[i] * x[i]).collect())?;
        total += weight * dd_recursive(g, &squares)?;
    }
    Ok(total)
}

/// `(g ∘ φ)[x_0, …, x_n]` by the general chain rule over all index chains
/// `0 = i_0 < … < i_k = n`.
pub fn dd_chain_generic(
    g: &dyn SmoothFunction,
    phi: &dyn SmoothFunction,
    nodes: &NodeList,
) -> Result<f64> {
    let x = nodes.nodes();
    let n = nodes.order();
    if n == 0 {
        return Ok(g.eval(phi.eval(x[0])));
    }
    // phi[x_a..=x_b] for all a < b
    let mut phi_dd = vec![0.0; (n + 1) * (n + 1)];
    for a in 0..n {
        for b in a + 1..=n {
            let sub = NodeList::with_merge_tol(x[a..=b].to_vec(), nodes.merge_tol())?;
            phi_dd[a * (n + 1) + b] = dd_recursive(phi, &sub)?;
        }
    }
    let phi_x: Vec<f64> = x.iter().map(|&v| phi.eval(v)).collect();
    let mut total = 0.0;
    // interior members of the chain are the set bits of `mask` over 1..n
    for mask in 0u64..(1u64 << (n - 1)) {
        let mut chain = vec![0];
        chain.extend((1..n).filter(|i| mask >> (i - 1) & 1 == 1));
        chain.push(n);
        let weight: f64 = chain
            .windows(2)
            .map(|w| phi_dd[w[0] * (n + 1) + w[1]])
            .product();
        if weight == 0.0 {
            continue;
        }
        let inner = NodeList::new(chain.iter().map(|&i| phi_x[i]).collect())?;
        total += weight * dd_recursive(g, &inner)?;
    }
    Ok(total)
}

/// `Σ_i f[x_0, …, x_i, x_i, …, x_n]`, which equals `f'[x_0, …, x_n]`.
pub fn dd_derivative_sum(f: &dyn SmoothFunction, nodes: &NodeList) -> Result<f64> {
    let x = nodes.nodes();
    let mut total = 0.0;
    for i in 0..x.len() {
        let mut doubled = x.to_vec();
        doubled.insert(i, x[i]);
        total += dd_recursive(f, &NodeList::with_merge_tol(doubled, nodes.merge_tol())?)?;
    }
    Ok(total)
}

/// `f'[x_0, …, x_n]` directly, for comparison with [`dd_derivative_sum`].
pub fn dd_of_derivative(f: &dyn SmoothFunction, nodes: &NodeList) -> Result<f64> {
    dd_recursive(&Derivative::of(f), nodes)
}

/// Uniformly random nodes in `[lo, hi]` with pairwise gaps at least `min_gap`.
pub fn random_nodes<R: Rng + ?Sized>(
    rng: &mut R,
    count: usize,
    lo: f64,
    hi: f64,
    min_gap: f64,
) -> Vec<f64> {
    loop {
        let x: Vec<f64> = (0..count).map(|_| rng.random_range(lo..hi)).collect();
        let mut sorted = x.clone();
        sorted.sort_by(|a, b| a.total_cmp(b));
        if sorted.windows(2).all(|w| w[1] - w[0] >= min_gap) {
            return x;
        }
    }
}
