//! Finite truncations of `(D, A)`: spectra, Hermitian perturbations, heat
//! kernels, brackets and the Duhamel expansion.

mod bracket;
mod duhamel;
mod matrix;
mod spectrum;

pub use bracket::{
    bracket_dd, bracket_dd_with, bracket_identity_check, bracket_mc, bracket_mc_with,
    heat_trace, BracketEstimate, BracketIdentityReport, BracketOptions, BracketValue,
    IdentityResidual,
};
pub use duhamel::{duhamel_residual, gauss_legendre_unit, DEFAULT_QUAD_POINTS};
pub use matrix::{
    anticommutator_d, commutator_d, commutator_d2, eigen_decompose, heat_kernel, max_abs,
    random_unitary, CMatrix, EigenDecomposition, HermitianMatrix, MatrixRecord,
};
pub use spectrum::Spectrum;

pub(crate) use matrix::check_dim;
