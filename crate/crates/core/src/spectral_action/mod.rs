//! The trace functional `S_D[A] = tr f(D + A)` and its Taylor expansion.

mod expand;
mod gauge;
mod terms;

pub use crate::multi_index::{epsilon_enumerate, parent_moves, EpsilonMultiIndex};
pub use expand::{expand, term_by_route, ExpandOptions, OrderRow, Route, ScalePoint, TaylorReport};
pub use gauge::{anti_hermitian, gauge_degeneracy, pure_gauge_direction, tadpole_check, GaugeDiagnostic};
pub use terms::{
    action_exact, gateaux_fd, gateaux_fd_mixed, taylor_term, taylor_term_bracket_form,
    taylor_term_bracket_form_with, taylor_term_contour, taylor_term_theorem_form,
    taylor_term_theorem_form_with, taylor_term_with, TermOptions, DEFAULT_FD_STEP, FD_ROMBERG_LEVELS,
};
