//! Extension domains for Hardy spaces `H^p`, `0 < p <= 1`.
//!
//! The crate checks the geometric conditions that decide whether an open set
//! `Omega` admits a bounded extension operator `H^p(Omega) -> H^p(R^n)`,
//! builds that operator explicitly on `(p, Omega)`-atoms, and estimates the
//! `H^p` quasi-norms of the results through smooth maximal functions. The
//! [`counterexamples`] module builds the Lipschitz witnesses that show the
//! conditions are needed.

pub mod cli;
pub mod conditions;
pub mod counterexamples;
pub mod error;
pub mod extension;
pub mod geometry;
pub mod maximal;
pub mod polyinterp;

mod optim;

pub use error::{Error, Result};

/// Library version embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
