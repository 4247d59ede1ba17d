//! Domains, their closed complements, distances, Whitney cubes and widths.

mod boxtree;
mod complement;
mod domain;
pub mod sampling;
mod shapes;
mod whitney;
mod width;

pub use complement::{ComplementKind, ComplementRep};
pub use domain::{BoxSpec, ComplementSpec, DomainModel, DomainSpec};
pub use shapes::{unit_ball_volume, unit_sphere_area, Ball, Cube, Point, MAX_DIM};
pub use whitney::{whitney_centers, whitney_decompose, WhitneyCube, WhitneyDecomposition};
pub use width::{directional_width, width, DirectionalWidth, Width, SPHERE_SCAN_DIRECTIONS};

pub(crate) use shapes::lex_cmp;

use crate::error::Result;

/// `d(x) = dist(x, Omega^c)`.
pub fn distance_to_complement(domain: &DomainModel, x: &[f64]) -> Result<f64> {
    domain.distance_to_complement(x)
}
