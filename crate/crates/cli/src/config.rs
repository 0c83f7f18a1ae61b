//! The JSON experiment config.
//!
//! A config is a single document with a versioned `schema` field. Every random
//! quantity carries an explicit seed; `--seed-override` rewrites all of them
//! at once.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spectral_taylor::checks::{
    BracketSuite, DuhamelSuite, GetzlerSuite, HolderSuite, NodeSuite, RouteSuite, SimplexSuite,
    SpectrumFamily, TriangleSuite,
};
use spectral_taylor::divdiff::DEFAULT_CONTOUR_POINTS;
use spectral_taylor::functions::{make_gaussian_mixture, DiscreteMeasure, GaussianMixture};
use spectral_taylor::operator::{commutator_d, CMatrix, HermitianMatrix, MatrixRecord, Spectrum};
use spectral_taylor::spectral_action::{Route, DEFAULT_FD_STEP};
use spectral_taylor::DEFAULT_TUPLE_BUDGET;

use crate::error::{CliError, Result};

pub const SCHEMA: &str = "spectral-taylor/1";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: String,
    #[serde(default)]
    pub spectrum: Option<SpectrumSpec>,
    #[serde(default)]
    pub perturbation: Option<PerturbationSpec>,
    #[serde(default)]
    pub function: FunctionSpec,
    #[serde(default)]
    pub run: RunSpec,
    #[serde(default)]
    pub verify: VerifySpec,
    #[serde(default)]
    pub bounds: BoundsSpec,
    #[serde(default)]
    pub bench: BenchSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SpectrumSpec {
    /// `±(k + 1/2)` truncated to `n` eigenvalues.
    DiracCircle { n: usize },
    /// `λ_k = k − (n − 1)/2`.
    Linear { n: usize },
    Explicit { values: Vec<f64> },
    RandomUniform { n: usize, cutoff: f64, seed: u64 },
}

impl SpectrumSpec {
    pub fn build(&self) -> Result<Spectrum> {
        let built = match self {
            SpectrumSpec::DiracCircle { n } => Spectrum::dirac_circle(*n),
            SpectrumSpec::Linear { n } => Spectrum::linear(*n),
            SpectrumSpec::Explicit { values } => Spectrum::from_unsorted(values.clone()),
            SpectrumSpec::RandomUniform { n, cutoff, seed } => {
                Spectrum::random_uniform(*n, *cutoff, *seed)
            }
        };
        built.map_err(|e| CliError::config("spectrum", e))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OneFormTerm {
    pub a: MatrixRecord,
    pub b: MatrixRecord,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PerturbationSpec {
    RandomHermitian { norm: f64, seed: u64 },
    Band { bandwidth: usize, norm: f64, seed: u64 },
    /// Hermitian part of `Σ_j a_j [D, b_j]`.
    OneForm { terms: Vec<OneFormTerm> },
    Explicit { matrix: MatrixRecord },
    Zero,
}

impl PerturbationSpec {
    pub fn build(&self, spec: &Spectrum) -> Result<HermitianMatrix> {
        let n = spec.len();
        let err = |e| CliError::config("perturbation", e);
        let a = match self {
            PerturbationSpec::RandomHermitian { norm, seed } => {
                HermitianMatrix::random(n, *norm, *seed).map_err(err)?
            }
            PerturbationSpec::Band {
                bandwidth,
                norm,
                seed,
            } => HermitianMatrix::random_banded(n, *bandwidth, *norm, *seed).map_err(err)?,
            PerturbationSpec::OneForm { terms } => {
                if terms.is_empty() {
                    return Err(CliError::config("perturbation.terms", "no terms"));
                }
                let mut sum = CMatrix::zeros(n, n);
                for (j, t) in terms.iter().enumerate() {
                    let at = |what: &str, e: spectral_taylor::Error| {
                        CliError::config(format!("perturbation.terms[{j}].{what}"), e)
                    };
                    let a = t.a.to_matrix().map_err(|e| at("a", e))?;
                    let b = t.b.to_matrix().map_err(|e| at("b", e))?;
                    if a.nrows() != n {
                        return Err(at(
                            "a",
                            spectral_taylor::Error::DimensionMismatch {
                                expected: n,
                                got: a.nrows(),
                            },
                        ));
                    }
                    sum += a * commutator_d(spec, &b).map_err(|e| at("b", e))?;
                }
                let hermitian = (&sum + sum.adjoint()).unscale(2.0);
                HermitianMatrix::new(hermitian).map_err(err)?
            }
            PerturbationSpec::Explicit { matrix } => {
                HermitianMatrix::try_from(matrix.clone()).map_err(err)?
            }
            PerturbationSpec::Zero => HermitianMatrix::zeros(n),
        };
        if a.dim() != n {
            return Err(err(spectral_taylor::Error::DimensionMismatch {
                expected: n,
                got: a.dim(),
            }));
        }
        Ok(a)
    }
}

/// Gaussian mixture `f(x) = Σ w e^{−t x²}` given by its atoms.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    pub atoms: DiscreteMeasure,
}

impl Default for FunctionSpec {
    fn default() -> Self {
        Self {
            atoms: DiscreteMeasure::from_pairs(&[(1.0, 1.0)]).expect("valid atom"),
        }
    }
}

impl FunctionSpec {
    pub fn build(&self) -> GaussianMixture {
        make_gaussian_mixture(self.atoms.clone())
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Largest admissible `|exact − partial_sum(n_max)| / |exact|`.
    pub remainder_rel: Option<f64>,
    /// Smallest admissible remainder scaling exponent.
    pub min_exponent: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSpec {
    pub n_max: usize,
    pub route: Route,
    pub budget: u64,
    pub prune_below: Option<f64>,
    pub cyclic_reduction: bool,
    pub contour_margin: f64,
    pub contour_points: usize,
    pub fd_step: f64,
    pub scales: Vec<f64>,
    pub tolerances: Tolerances,
    pub out: PathBuf,
}

impl Default for RunSpec {
    fn default() -> Self {
        Self {
            n_max: 4,
            route: Route::Dd,
            budget: DEFAULT_TUPLE_BUDGET,
            prune_below: None,
            cyclic_reduction: true,
            contour_margin: 1.0,
            contour_points: DEFAULT_CONTOUR_POINTS,
            fd_step: DEFAULT_FD_STEP,
            scales: vec![1.0, 0.5, 0.25],
            tolerances: Tolerances::default(),
            out: PathBuf::from("out"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyCheck {
    DivdiffTriangle,
    ChainSquare,
    DerivativeSum,
    Routes,
    Brackets,
    Duhamel,
    Epsilon,
}

impl VerifyCheck {
    pub const ALL: [VerifyCheck; 7] = [
        VerifyCheck::DivdiffTriangle,
        VerifyCheck::ChainSquare,
        VerifyCheck::DerivativeSum,
        VerifyCheck::Routes,
        VerifyCheck::Brackets,
        VerifyCheck::Duhamel,
        VerifyCheck::Epsilon,
    ];
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySpec {
    pub checks: Vec<VerifyCheck>,
    pub triangle: TriangleSuite,
    /// Node sets of the chain-rule and derivative-sum suites.
    pub nodes: NodeSuite,
    pub routes: Vec<RouteSuite>,
    pub brackets: BracketSuite,
    pub duhamel: DuhamelSuite,
    pub epsilon_max_order: usize,
}

impl Default for VerifySpec {
    fn default() -> Self {
        let triangle = TriangleSuite {
            nodes: NodeSuite {
                instances: 50,
                tolerance: 1e-8,
                ..NodeSuite::default()
            },
            mc_samples: 20_000,
            // family-wise level of about 0.3 % over the 50 comparisons
            mc_sigmas: 4.0,
            ..TriangleSuite::default()
        };
        let random = RouteSuite {
            orders: (1..=4).collect(),
            instances: 4,
            ..RouteSuite::default()
        };
        let repeated = RouteSuite {
            spectrum: SpectrumFamily::RepeatedDirac { multiplicity: 2 },
            instances: 2,
            ..random.clone()
        };
        Self {
            checks: VerifyCheck::ALL.to_vec(),
            triangle,
            nodes: NodeSuite {
                max_nodes: 6,
                ..NodeSuite::default()
            },
            routes: vec![random, repeated],
            brackets: BracketSuite::default(),
            duhamel: DuhamelSuite::default(),
            epsilon_max_order: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundCheck {
    Simplex,
    Getzler,
    Holder,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundsSpec {
    pub checks: Vec<BoundCheck>,
    pub simplex: SimplexSuite,
    pub getzler: GetzlerSuite,
    pub holder: HolderSuite,
}

impl Default for BoundsSpec {
    fn default() -> Self {
        Self {
            checks: vec![BoundCheck::Simplex, BoundCheck::Getzler, BoundCheck::Holder],
            simplex: SimplexSuite {
                samples: 100_000,
                ..SimplexSuite::default()
            },
            getzler: GetzlerSuite::default(),
            holder: HolderSuite::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchSpec {
    pub dims: Vec<usize>,
    pub orders: Vec<usize>,
    pub spectrum: SpectrumFamily,
    pub norm: f64,
    pub seed: u64,
    pub repeats: usize,
}

impl Default for BenchSpec {
    fn default() -> Self {
        Self {
            dims: vec![4, 8],
            orders: (1..=4).collect(),
            spectrum: SpectrumFamily::RandomUniform { cutoff: 1.5 },
            norm: 0.5,
            seed: 1,
            repeats: 1,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            // serde_json messages already end in "at line L column C"
            let path = e.path().to_string();
            CliError::config(path, e.into_inner())
        })?;
        if config.schema != SCHEMA {
            return Err(CliError::config(
                "schema",
                format!("unsupported schema '{}', expected '{SCHEMA}'", config.schema),
            ));
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(path.display().to_string(), e))?;
        Self::from_json(&text)
    }

    /// Replaces every seed in the config by `seed`.
    pub fn override_seeds(&mut self, seed: u64) {
        if let Some(SpectrumSpec::RandomUniform { seed: s, .. }) = &mut self.spectrum {
            *s = seed;
        }
        match &mut self.perturbation {
            Some(PerturbationSpec::RandomHermitian { seed: s, .. })
            | Some(PerturbationSpec::Band { seed: s, .. }) => *s = seed,
            _ => {}
        }
        let v = &mut self.verify;
        v.triangle.nodes.seed = seed;
        v.nodes.seed = seed;
        for r in &mut v.routes {
            r.seed = seed;
        }
        v.brackets.seed = seed;
        v.duhamel.seed = seed;
        let b = &mut self.bounds;
        b.simplex.seed = seed;
        b.getzler.seed = seed;
        b.holder.seed = seed;
        self.bench.seed = seed;
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        self.spectrum
            .as_ref()
            .ok_or_else(|| CliError::config("spectrum", "missing field `spectrum`"))?
            .build()
    }

    pub fn perturbation(&self, spec: &Spectrum) -> Result<HermitianMatrix> {
        self.perturbation
            .as_ref()
            .ok_or_else(|| CliError::config("perturbation", "missing field `perturbation`"))?
            .build(spec)
    }
}
