//! Witnesses for the necessity of the geometric conditions: the Cantor dust
//! (width condition without measure condition), the slab Lipschitz functions
//! built from iterated integrals of a logarithm, sampled seminorm estimators
//! and the pairing that turns them into lower bounds.
//!
//! Every seminorm here is a sampled supremum and so a lower bound of the true
//! value.

mod domains;
mod lipschitz;
mod necessity;
mod pairing;
mod seminorms;

pub use domains::{cantor_dust_domain, cantor_endpoints, segment_domain, unit_cell, MAX_DUST_LEVEL, MAX_DUST_POINTS};
pub use lipschitz::{build_fk, g_log, lip_witness_nd, Cutoff, FkMeta, LipWitness, Sampled1DFunction, MAX_FK_ORDER};
pub use necessity::{
    ladder_a, ladder_epsilon, necessity_demo, NecessityParams, NecessityRow, NecessityTable, NOTE_P1,
};
pub use pairing::{central_difference, pairing, FnTest, TestFunction};
pub use seminorms::{
    bmo_omega_seminorm, bmo_seminorm, forward_difference, lip_seminorm, BmoOmegaSampling, GridFunction,
    LipSampling, SeminormKind, SeminormReport, SeminormWitness,
};
