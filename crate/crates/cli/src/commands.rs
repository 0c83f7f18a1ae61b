use std::path::Path;
use std::time::Instant;

use spectral_taylor::checks::{
    bracket_identities, chain_square_suite, derivative_sum_suite, divdiff_triangle, duhamel_suite,
    epsilon_combinatorics, getzler_suite, holder_suite, route_agreement, simplex_suite, BoundRow,
    CheckRow,
};
use spectral_taylor::divdiff::{dd_contour, dd_recursive, Contour, NodeList};
use spectral_taylor::functions::GaussianMixture;
use spectral_taylor::operator::HermitianMatrix;
use spectral_taylor::spectral_action::{expand, taylor_term_with, ExpandOptions, TaylorReport, TermOptions};
use spectral_taylor::tuple_count;

use crate::config::{BoundCheck, ExperimentConfig, VerifyCheck};
use crate::error::{CliError, Result};
use crate::output::{bench_csv, bound_csv, check_csv, fmt_f64, write_atomic, BenchRow};

/// Runs the Taylor expansion, writes `expand.csv` and `expand.txt`, then
/// applies the configured tolerances.
pub fn cmd_expand(config: &ExperimentConfig, out: &Path) -> Result<TaylorReport> {
    let spec = config.spectrum()?;
    let a = config.perturbation(&spec)?;
    let f = config.function.build();
    let run = &config.run;
    let opts = ExpandOptions {
        route: run.route,
        term: TermOptions {
            budget: run.budget,
            prune_below: run.prune_below,
            cyclic_reduction: run.cyclic_reduction,
            ..TermOptions::default()
        },
        contour: Some(Contour::enclosing(
            spec.values(),
            run.contour_margin,
            run.contour_points,
        )),
        fd_step: run.fd_step,
        scales: run.scales.clone(),
    };
    let report = expand(&spec, &a, &f, run.n_max, &opts)?;
    write_atomic(out, "expand.csv", report.to_csv().as_bytes())?;
    write_atomic(out, "expand.txt", report.summary().as_bytes())?;

    let tol = &run.tolerances;
    let mut failed = 0;
    let mut total = 0;
    if let Some(rel) = tol.remainder_rel {
        total += 1;
        if report.final_remainder() > rel * report.exact.abs() {
            failed += 1;
        }
    }
    if let Some(min) = tol.min_exponent {
        total += 1;
        // an identically vanishing remainder has no exponent and passes
        if report.exponent().is_some_and(|e| e < min) {
            failed += 1;
        }
    }
    if failed > 0 {
        return Err(CliError::Tolerance { failed, total });
    }
    Ok(report)
}

/// Runs the configured verification suites into `verify.csv`.
pub fn cmd_verify(config: &ExperimentConfig, out: &Path) -> Result<Vec<CheckRow>> {
    let v = &config.verify;
    let mut rows = Vec::new();
    for check in &v.checks {
        match check {
            VerifyCheck::DivdiffTriangle => rows.extend(divdiff_triangle(&v.triangle)?),
            VerifyCheck::ChainSquare => rows.extend(chain_square_suite(&v.nodes)?),
            VerifyCheck::DerivativeSum => rows.extend(derivative_sum_suite(&v.nodes)?),
            VerifyCheck::Routes => {
                for suite in &v.routes {
                    rows.extend(route_agreement(suite)?);
                }
            }
            VerifyCheck::Brackets => rows.extend(bracket_identities(&v.brackets)?),
            VerifyCheck::Duhamel => rows.extend(duhamel_suite(&v.duhamel)?),
            VerifyCheck::Epsilon => rows.extend(epsilon_combinatorics(v.epsilon_max_order)),
        }
    }
    write_atomic(out, "verify.csv", &check_csv(&rows))?;
    tolerance_outcome(rows.iter().filter(|r| !r.passed).count(), rows.len())?;
    Ok(rows)
}

/// Runs the configured inequality suites into `bounds.csv`.
pub fn cmd_bounds(config: &ExperimentConfig, out: &Path) -> Result<Vec<BoundRow>> {
    let b = &config.bounds;
    let mut rows = Vec::new();
    for check in &b.checks {
        match check {
            BoundCheck::Simplex => rows.extend(simplex_suite(&b.simplex)?),
            BoundCheck::Getzler => rows.extend(getzler_suite(&b.getzler)?),
            BoundCheck::Holder => rows.extend(holder_suite(&b.holder)?),
        }
    }
    write_atomic(out, "bounds.csv", &bound_csv(&rows))?;
    tolerance_outcome(rows.iter().filter(|r| !r.report.passed).count(), rows.len())?;
    Ok(rows)
}

/// Times `taylor_term` over the configured `(N, n)` grid into `bench.csv`.
pub fn cmd_bench(config: &ExperimentConfig, out: &Path) -> Result<Vec<BenchRow>> {
    let b = &config.bench;
    let f = config.function.build();
    let opts = TermOptions {
        budget: config.run.budget,
        cyclic_reduction: config.run.cyclic_reduction,
        ..TermOptions::default()
    };
    let mut rows = Vec::new();
    for &dim in &b.dims {
        let spec = b
            .spectrum
            .build(dim, b.seed)
            .map_err(|e| CliError::config("bench.spectrum", e))?;
        let a = HermitianMatrix::random(dim, b.norm, b.seed)
            .map_err(|e| CliError::config("bench.norm", e))?;
        for &order in &b.orders {
            let tuples = tuple_count(dim, order, config.run.budget)?;
            let start = Instant::now();
            for _ in 0..b.repeats.max(1) {
                std::hint::black_box(taylor_term_with(order, &spec, &a, &f, &opts)?);
            }
            let seconds = start.elapsed().as_secs_f64() / b.repeats.max(1) as f64;
            rows.push(BenchRow {
                dim,
                order,
                tuples,
                seconds,
            });
        }
    }
    write_atomic(out, "bench.csv", &bench_csv(&rows))?;
    Ok(rows)
}

/// Ad-hoc divided difference `f[x_0, …, x_n]` by the Newton table and by a
/// contour integral.
pub fn cmd_divdiff(nodes: &[f64], atoms: &[(f64, f64)]) -> Result<String> {
    let f = GaussianMixture::new(atoms).map_err(|e| CliError::config("--atom", e))?;
    let list = NodeList::new(nodes.to_vec()).map_err(|e| CliError::config("--nodes", e))?;
    let recursive = dd_recursive(&f, &list)?;
    let contour = dd_contour(
        &f,
        &list,
        &Contour::enclosing(list.nodes(), 1.0, spectral_taylor::divdiff::DEFAULT_CONTOUR_POINTS),
    )?;
    Ok(format!(
        "recursive {}\ncontour   {}\n",
        fmt_f64(recursive),
        fmt_f64(contour)
    ))
}

fn tolerance_outcome(failed: usize, total: usize) -> Result<()> {
    if failed > 0 {
        return Err(CliError::Tolerance { failed, total });
    }
    Ok(())
}
