//! `(p, Omega)`-atoms and their extensions to distributions on `R^n` with
//! vanishing moments up to the critical order.
//!
//! The supporting ball of an atom on the Whitney cube `Q` is `B(x0, r)` with
//! `x0` the center of `Q` and `r = d(x0)`; the construction uses the
//! complement inside `B(x0, a r)`.

mod atom;
mod distribution;
mod operator;
mod rational;

pub use atom::{make_whitney_atom, patterns, validate_atom, PAtom, MAX_SUBDIVISIONS};
pub use distribution::{
    moments, moments_with_tolerance, DiracTerm, ExtendedDistribution, ExtensionCase, ExtensionMeta,
    MomentEntry, MomentReport, WeightedCell, MOMENT_REL_TOL,
};
pub use operator::{
    extend_atom, extend_combination, extend_generic, extend_p1, extend_special, CombinationReport,
    ExtensionOperator, ExtensionParams, GENERIC_MAX_A, MAX_COEFFICIENT_RATIO, MAX_NODE_SAMPLES,
    MSG_MEASURE_VIOLATED, MSG_WIDTH_VIOLATED,
};
pub use rational::{critical_order, CriticalOrder, RationalP};

pub(crate) use distribution::box_monomial_integral;
