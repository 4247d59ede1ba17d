//! Polynomials of bounded degree, Hermite evaluation rows, node selection on
//! thin sets and dual (interpolation) bases.

mod dual;
mod nodes;
mod poly;

pub use dual::{
    dual_basis, sup_norms_on_unit_ball, verify_reverse_markov, DualBasis, MAX_CONDITION,
    SUP_GRID_PITCH, SUP_GRID_PITCH_3D,
};
pub use nodes::{
    candidate_nodes, hermite_matrix, hermite_row, select_nodes, Node, NodeSet, SelectionStrategy,
    EXHAUSTIVE_MAX_CANDIDATES,
};
pub use poly::{monomial_values, monomials, poly_derivative, poly_eval, poly_space_dim, MultiIndex, Polynomial};

pub(crate) use poly::{binomial, factorial};
