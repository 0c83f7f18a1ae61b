//! Taylor expansion of the trace functional `S_D[A] = tr f(D + A)` for a
//! finite diagonal `D`, computed through divided differences and checked
//! against independent numerical routes.
//!
//! The `n`-th contribution is
//! `(1/n) Σ A_{i_1 i_2} ⋯ A_{i_n i_1} f'[λ_{i_1}, …, λ_{i_n}]`. It is also
//! available as an `(n+1)`-node divided difference of `f`, as a sum of
//! heat-kernel brackets, as a Cauchy integral and by finite differences.
//!
//! With the default `parallel` feature the tuple sums and Monte Carlo
//! estimators run on rayon. Work is split into fixed chunks reduced in chunk
//! order, so sequential and parallel results are bit-identical.

pub mod bounds;
pub mod checks;
pub mod divdiff;
mod error;
pub mod exec;
pub mod functions;
pub mod multi_index;
pub mod operator;
pub mod simplex;
pub mod spectral_action;
mod tuples;

pub use error::{Error, Result};
pub use exec::Exec;
pub use tuples::{tuple_count, DEFAULT_TUPLE_BUDGET};
