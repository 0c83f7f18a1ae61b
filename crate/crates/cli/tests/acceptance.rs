//! Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned below.
//! Runs without the libtest harness so that every line is printed.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use spectral_taylor::checks::{
    bracket_identities, chain_square_suite, derivative_sum_suite, divdiff_triangle, duhamel_suite,
    epsilon_combinatorics, getzler_suite, route_agreement, simplex_suite, BoundRow, BracketSuite,
    CheckRow, DuhamelSuite, GetzlerSuite, NodeSuite, RouteSuite, SimplexSuite, SpectrumFamily,
    TriangleSuite,
};
use spectral_taylor::functions::GaussianMixture;
use spectral_taylor::operator::{HermitianMatrix, Spectrum};
use spectral_taylor::spectral_action::{expand, ExpandOptions};

const TRIANGLE_CONTOUR_REL: f64 = 1e-8;
const TRIANGLE_MC_SIGMAS: f64 = 3.0;
const TRIANGLE_MC_SAMPLES: u64 = 100_000;
const CHAIN_REL: f64 = 1e-9;
const DERIVATIVE_SUM_REL: f64 = 1e-9;
const ROUTES_ANALYTIC_REL: f64 = 1e-8;
const ROUTES_FD_REL: f64 = 1e-4;
const CONVERGENCE_REMAINDER_REL: f64 = 1e-6;
const CONVERGENCE_MIN_EXPONENT: f64 = 6.5;
const BRACKET_IDENTITY_REL: f64 = 1e-9;
const DUHAMEL_RESIDUAL: f64 = 1e-8;
const DUHAMEL_QUAD_POINTS: usize = 64;
const SIMPLEX_SAMPLES: u64 = 1_000_000;
const EPSILON_MAX_ORDER: usize = 10;

struct Outcome {
    passed: bool,
    detail: String,
}

fn worst(rows: &[CheckRow], check: &str) -> f64 {
    rows.iter()
        .filter(|r| r.check == check)
        .map(|r| r.error)
        .fold(0.0, f64::max)
}

fn failures(rows: &[CheckRow]) -> Vec<&CheckRow> {
    rows.iter().filter(|r| !r.passed).collect()
}

fn describe_failures(rows: &[&CheckRow]) -> String {
    rows.iter()
        .take(3)
        .map(|r| format!("{} [{}] {:.3e} > {:.1e}", r.check, r.case, r.error, r.tolerance))
        .collect::<Vec<_>>()
        .join("; ")
}

fn within(limit: Option<Duration>, elapsed: Duration) -> (bool, String) {
    let secs = elapsed.as_secs_f64();
    match limit {
        Some(l) => (elapsed <= l, format!("{secs:.2}s (limit {}s)", l.as_secs())),
        None => (true, format!("{secs:.2}s")),
    }
}

fn check_rows(
    rows: &[CheckRow],
    limit: Option<Duration>,
    elapsed: Duration,
    summary: String,
) -> Outcome {
    let bad = failures(rows);
    let (fast, time) = within(limit, elapsed);
    let mut detail = format!("{} rows, {summary}, {time}", rows.len());
    if !bad.is_empty() {
        detail.push_str(&format!("; {} failed: {}", bad.len(), describe_failures(&bad)));
    }
    Outcome {
        passed: bad.is_empty() && fast && !rows.is_empty(),
        detail,
    }
}

fn node_suite(max_nodes: usize, tolerance: f64) -> NodeSuite {
    NodeSuite {
        instances: 200,
        max_nodes,
        lo: -2.0,
        hi: 2.0,
        min_gap: 1e-3,
        seed: 1,
        tolerance,
    }
}

fn route_suite(spectrum: SpectrumFamily) -> RouteSuite {
    RouteSuite {
        dims: (2..=6).collect(),
        orders: (1..=5).collect(),
        instances: 50,
        spectrum,
        analytic_tolerance: ROUTES_ANALYTIC_REL,
        fd_tolerance: ROUTES_FD_REL,
        ..RouteSuite::default()
    }
}

fn divided_difference_triangle() -> Outcome {
    let suite = TriangleSuite {
        nodes: node_suite(7, TRIANGLE_CONTOUR_REL),
        mc_samples: TRIANGLE_MC_SAMPLES,
        mc_sigmas: TRIANGLE_MC_SIGMAS,
        ..TriangleSuite::default()
    };
    let start = Instant::now();
    let rows = divdiff_triangle(&suite).expect("triangle suite");
    let summary = format!(
        "worst contour rel {:.2e}, worst MC deviation {:.2} stderr",
        worst(&rows, "divdiff.recursive~contour"),
        worst(&rows, "divdiff.recursive~hermite_mc")
    );
    check_rows(&rows, Some(Duration::from_secs(30)), start.elapsed(), summary)
}

fn chain_rule() -> Outcome {
    let start = Instant::now();
    let rows = chain_square_suite(&node_suite(6, CHAIN_REL)).expect("chain suite");
    let summary = format!("worst rel {:.2e}", worst(&rows, "chain.square"));
    check_rows(&rows, Some(Duration::from_secs(10)), start.elapsed(), summary)
}

fn derivative_sum() -> Outcome {
    let start = Instant::now();
    let rows = derivative_sum_suite(&node_suite(7, DERIVATIVE_SUM_REL)).expect("derivative sum");
    let summary = format!("worst rel {:.2e}", worst(&rows, "derivative_sum"));
    check_rows(&rows, None, start.elapsed(), summary)
}

fn routes(families: &[SpectrumFamily], limit: Option<Duration>) -> Outcome {
    let start = Instant::now();
    let mut rows = Vec::new();
    for family in families {
        rows.extend(route_agreement(&route_suite(family.clone())).expect("route suite"));
    }
    let summary = format!(
        "worst analytic rel {:.2e}, worst fd rel {:.2e}",
        worst(&rows, "taylor.analytic_routes"),
        worst(&rows, "taylor.fd_oracle")
    );
    check_rows(&rows, limit, start.elapsed(), summary)
}

fn convergence() -> Outcome {
    let start = Instant::now();
    let spec = Spectrum::dirac_circle(8).expect("spectrum");
    let a = HermitianMatrix::random(8, 0.1, 7).expect("perturbation");
    let f = GaussianMixture::new(&[(1.0, 1.0)]).expect("function");
    let opts = ExpandOptions {
        scales: vec![1.0, 0.5, 0.25],
        ..ExpandOptions::default()
    };
    let report = expand(&spec, &a, &f, 6, &opts).expect("expansion");
    let rel = report.final_remainder() / report.exact.abs();
    let exponent = report.exponent().unwrap_or(f64::INFINITY);
    let (fast, time) = within(Some(Duration::from_secs(60)), start.elapsed());
    Outcome {
        passed: rel <= CONVERGENCE_REMAINDER_REL && exponent >= CONVERGENCE_MIN_EXPONENT && fast,
        detail: format!(
            "relative remainder {rel:.2e} (limit {CONVERGENCE_REMAINDER_REL:.0e}), \
             exponent {exponent:.3} (limit {CONVERGENCE_MIN_EXPONENT}), {time}"
        ),
    }
}

fn brackets() -> Outcome {
    let suite = BracketSuite {
        instances: 100,
        max_dim: 4,
        max_order: 3,
        tolerance: BRACKET_IDENTITY_REL,
        ..BracketSuite::default()
    };
    let start = Instant::now();
    let rows = bracket_identities(&suite).expect("bracket suite");
    let summary = format!("worst rel {:.2e}", worst(&rows, "bracket.identities"));
    check_rows(&rows, None, start.elapsed(), summary)
}

fn duhamel() -> Outcome {
    let suite = DuhamelSuite {
        instances: 50,
        max_dim: 5,
        t_min: 0.1,
        t_max: 2.0,
        quad_points: DUHAMEL_QUAD_POINTS,
        tolerance: DUHAMEL_RESIDUAL,
        ..DuhamelSuite::default()
    };
    let start = Instant::now();
    let rows = duhamel_suite(&suite).expect("duhamel suite");
    let summary = format!("worst residual {:.2e}", worst(&rows, "duhamel.residual"));
    check_rows(&rows, None, start.elapsed(), summary)
}

fn bound_outcome(rows: &[BoundRow], extra: String) -> Outcome {
    let bad: Vec<&BoundRow> = rows.iter().filter(|r| !r.report.passed).collect();
    let mut detail = format!("{} rows, {extra}", rows.len());
    for r in bad.iter().take(3) {
        detail.push_str(&format!(
            "; FAILED {} [{}] lhs {:.4e} rhs {:.4e}",
            r.check, r.case, r.report.lhs, r.report.rhs
        ));
    }
    Outcome {
        passed: bad.is_empty() && !rows.is_empty(),
        detail,
    }
}

fn simplex() -> Outcome {
    let suite = SimplexSuite {
        max_m: 8,
        max_k: 4,
        samples: SIMPLEX_SAMPLES,
        seed: 1,
    };
    let rows = simplex_suite(&suite).expect("simplex suite");
    let volume_rows = rows.iter().filter(|r| r.check == "simplex.volume").count();
    let tightest = rows
        .iter()
        .filter(|r| r.check == "simplex.bound")
        .map(|r| r.report.lhs / r.report.rhs)
        .fold(0.0, f64::max);
    bound_outcome(
        &rows,
        format!("{volume_rows} volume equalities, largest lhs/rhs {tightest:.4}"),
    )
}

fn getzler_szenes() -> Outcome {
    let rows = getzler_suite(&GetzlerSuite {
        instances: 100,
        ..GetzlerSuite::default()
    })
    .expect("getzler suite");
    let min_margin = rows.iter().map(|r| r.report.margin).fold(f64::INFINITY, f64::min);
    let mut outcome = bound_outcome(&rows, format!("smallest margin {min_margin:.3e}"));
    outcome.passed &= min_margin > 0.0;
    outcome
}

fn epsilon() -> Outcome {
    let start = Instant::now();
    let rows = epsilon_combinatorics(EPSILON_MAX_ORDER);
    let checked: usize = (1..=EPSILON_MAX_ORDER + 1).map(|n| 1usize << n).sum();
    check_rows(
        &rows,
        Some(Duration::from_secs(1)),
        start.elapsed(),
        format!("{checked} bitstrings up to order {}", EPSILON_MAX_ORDER + 1),
    )
}

const VERIFY_CONFIG: &str = r#"{
  "schema": "spectral-taylor/1",
  "verify": {
    "checks": ["divdiff_triangle", "chain_square", "derivative_sum", "routes",
               "brackets", "duhamel", "epsilon"]
  }
}"#;

fn reproducibility() -> Outcome {
    let dir = tempfile::tempdir().expect("temp dir");
    let config = dir.path().join("verify.json");
    std::fs::write(&config, VERIFY_CONFIG).expect("write config");
    let run = |name: &str| {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_spectral-taylor"))
            .args(["verify", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .stdout(Stdio::null())
            .status()
            .expect("run spectral-taylor");
        (status.code(), std::fs::read(out.join("verify.csv")).unwrap_or_default())
    };
    let (code_a, csv_a) = run("a");
    let (code_b, csv_b) = run("b");
    let lines = csv_a.iter().filter(|&&b| b == b'\n').count();
    Outcome {
        passed: !csv_a.is_empty() && csv_a == csv_b && code_a == code_b,
        detail: format!(
            "{} bytes, {lines} lines, identical: {}, exit codes {code_a:?}/{code_b:?}",
            csv_a.len(),
            csv_a == csv_b
        ),
    }
}

fn main() {
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("divided-difference triangle", Box::new(divided_difference_triangle)),
        ("chain rule for g(x^2)", Box::new(chain_rule)),
        ("derivative-sum identity", Box::new(derivative_sum)),
        (
            "route agreement",
            Box::new(|| {
                routes(
                    &[SpectrumFamily::RandomUniform { cutoff: 1.5 }],
                    Some(Duration::from_secs(300)),
                )
            }),
        ),
        ("convergence of the expansion", Box::new(convergence)),
        (
            "degenerate spectra",
            Box::new(|| {
                routes(
                    &[
                        SpectrumFamily::DiracCircle,
                        SpectrumFamily::RepeatedDirac { multiplicity: 2 },
                    ],
                    Some(Duration::from_secs(120)),
                )
            }),
        ),
        ("bracket identities", Box::new(brackets)),
        ("Duhamel residual", Box::new(duhamel)),
        ("simplex bound", Box::new(simplex)),
        ("Getzler-Szenes inequality", Box::new(getzler_szenes)),
        ("epsilon multi-index combinatorics", Box::new(epsilon)),
        ("CLI reproducibility", Box::new(reproducibility)),
    ];

    let mut red = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Outcome {
                passed: false,
                detail: format!("panicked: {msg}"),
            }
        });
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {tag} {name}: {}", i + 1, outcome.detail);
        if !outcome.passed {
            red += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - red, criteria.len());
    if red > 0 {
        std::process::exit(1);
    }
}
