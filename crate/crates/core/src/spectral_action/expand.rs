use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::terms::{
    action_exact, gateaux_fd, taylor_term_bracket_form_with, taylor_term_contour,
    taylor_term_theorem_form_with, taylor_term_with, TermOptions, DEFAULT_FD_STEP,
};
use crate::divdiff::{Contour, DEFAULT_CONTOUR_POINTS};
use crate::error::{Error, Result};
use crate::functions::SmoothFunction;
use crate::operator::{HermitianMatrix, Spectrum};

/// How per-order contributions are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    /// Divided differences of `f'` over `n` eigenvalues.
    #[default]
    Dd,
    /// Divided differences of `f` over `n + 1` nodes with a repeated node.
    Theorem,
    /// Heat-kernel brackets integrated against the Laplace–Stieltjes measure.
    Bracket,
    /// Cauchy integral of `f'` against the resolvent.
    Contour,
    /// Finite differences of `tr f(D + uA)`.
    Fd,
}

impl Route {
    pub const ALL: [Route; 5] = [
        Route::Dd,
        Route::Theorem,
        Route::Bracket,
        Route::Contour,
        Route::Fd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Route::Dd => "dd",
            Route::Theorem => "theorem",
            Route::Bracket => "bracket",
            Route::Contour => "contour",
            Route::Fd => "fd",
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Route::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::OutOfRange(format!("unknown route '{s}'")))
    }
}

#[derive(Debug, Clone)]
pub struct ExpandOptions {
    pub route: Route,
    pub term: TermOptions,
    /// Contour for [`Route::Contour`]; defaults to an ellipse one unit beyond
    /// the spectrum with [`DEFAULT_CONTOUR_POINTS`] points.
    pub contour: Option<Contour>,
    pub fd_step: f64,
    /// Scales `ε` of the remainder study, largest first.
    pub scales: Vec<f64>,
}

impl Default for ExpandOptions {
    fn default() -> Self {
        Self {
            route: Route::Dd,
            term: TermOptions::default(),
            contour: None,
            fd_step: DEFAULT_FD_STEP,
            scales: vec![1.0, 0.5, 0.25],
        }
    }
}

/// One Taylor contribution by the chosen route.
pub fn term_by_route(
    route: Route,
    n: usize,
    spec: &Spectrum,
    a: &HermitianMatrix,
    f: &dyn SmoothFunction,
    opts: &ExpandOptions,
) -> Result<f64> {
    Ok(match route {
        Route::Dd => taylor_term_with(n, spec, a, f, &opts.term)?.re,
        Route::Theorem => taylor_term_theorem_form_with(n, spec, a, f, &opts.term)?.re,
        Route::Bracket => taylor_term_bracket_form_with(n, spec, a, f, &opts.term)?.re,
        Route::Contour => {
            let c = opts.contour.unwrap_or_else(|| {
                Contour::enclosing(spec.values(), 1.0, DEFAULT_CONTOUR_POINTS)
            });
            taylor_term_contour(n, spec, a, f, &c)?
        }
        Route::Fd => gateaux_fd(n, spec, a, f, opts.fd_step)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderRow {
    pub order: usize,
    pub contribution: f64,
    pub partial_sum: f64,
    pub remainder: f64,
}

/// Remainder after the last order for the perturbation `scale · A`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalePoint {
    pub scale: f64,
    pub exact: f64,
    pub remainder: f64,
}

/// Per-order contributions, partial sums, exact value and remainder scaling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaylorReport {
    pub route: Route,
    pub rows: Vec<OrderRow>,
    pub exact: f64,
    pub scaling: Vec<ScalePoint>,
    /// `ln(R_a / R_b) / ln(ε_a / ε_b)` for consecutive scales.
    pub exponent_estimates: Vec<f64>,
}

impl TaylorReport {
    pub fn n_max(&self) -> usize {
        self.rows.last().map_or(0, |r| r.order)
    }

    pub fn final_remainder(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.remainder)
    }

    /// Smallest measured scaling exponent, if any remainder was non-zero.
    pub fn exponent(&self) -> Option<f64> {
        self.exponent_estimates
            .iter()
            .copied()
            .filter(|e| e.is_finite())
            .reduce(f64::min)
    }

    /// CSV with columns `order,contribution,partial_sum,remainder`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("order,contribution,partial_sum,remainder\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{:.16e},{:.16e},{:.16e}",
                r.order, r.contribution, r.partial_sum, r.remainder
            );
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "route: {}", self.route);
        let _ = writeln!(out, "exact tr f(D+A): {:.16e}", self.exact);
        for r in &self.rows {
            let _ = writeln!(
                out,
                "order {:>2}: contribution {:+.6e}  partial sum {:.12e}  remainder {:.3e}",
                r.order, r.contribution, r.partial_sum, r.remainder
            );
        }
        for p in &self.scaling {
            let _ = writeln!(
                out,
                "scale {:<6}: remainder after order {} = {:.3e}",
                p.scale,
                self.n_max(),
                p.remainder
            );
        }
        match self.exponent() {
            Some(e) => {
                let _ = writeln!(out, "remainder scaling exponent: {e:.3}");
            }
            None => out.push_str("remainder scaling exponent: n/a (zero remainder)\n"),
        }
        out
    }
}

/// Taylor expansion of `tr f(D + A)` up to `n_max` with remainder diagnostics.
pub fn expand(
    spec: &Spectrum,
    a: &HermitianMatrix,
    f: &dyn SmoothFunction,
    n_max: usize,
    opts: &ExpandOptions,
) -> Result<TaylorReport> {
    // every contribution beyond order 0 vanishes identically
    let n_max = if a.is_zero() { 0 } else { n_max };
    let exact = action_exact(spec, a, f)?;
    let mut rows = Vec::with_capacity(n_max + 1);
    let mut partial = 0.0;
    let mut contributions = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let c = term_by_route(opts.route, n, spec, a, f, opts)?;
        contributions.push(c);
        partial += c;
        rows.push(OrderRow {
            order: n,
            contribution: c,
            partial_sum: partial,
            remainder: (exact - partial).abs(),
        });
    }

    // contribution n is homogeneous of degree n in A
    let mut scaling = Vec::with_capacity(opts.scales.len());
    for &eps in &opts.scales {
        let exact_eps = if eps == 1.0 {
            exact
        } else {
            action_exact(spec, &a.scaled(eps), f)?
        };
        let partial_eps: f64 = contributions
            .iter()
            .enumerate()
            .map(|(n, c)| c * eps.powi(n as i32))
            .sum();
        scaling.push(ScalePoint {
            scale: eps,
            exact: exact_eps,
            remainder: (exact_eps - partial_eps).abs(),
        });
    }
    let exponent_estimates = scaling
        .windows(2)
        .filter(|w| w[0].remainder > 0.0 && w[1].remainder > 0.0)
        .map(|w| (w[0].remainder / w[1].remainder).ln() / (w[0].scale / w[1].scale).ln())
        .collect();
    Ok(TaylorReport {
        route: opts.route,
        rows,
        exact,
        scaling,
        exponent_estimates,
    })
}
