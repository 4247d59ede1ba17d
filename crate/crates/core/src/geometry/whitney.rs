use serde::{Deserialize, Serialize};

use super::domain::DomainModel;
use super::shapes::{lex_cmp, Cube};
use crate::error::{Error, Result};

/// A dyadic cube with `diam(Q) <= dist(Q, Omega^c) <= 4 diam(Q)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WhitneyCube {
    pub cube: Cube,
    pub dist_to_complement: f64,
}

impl WhitneyCube {
    pub fn satisfies_invariant(&self, rel_tol: f64) -> bool {
        let d = self.cube.diam();
        self.dist_to_complement >= d * (1.0 - rel_tol)
            && self.dist_to_complement <= 4.0 * d * (1.0 + rel_tol)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WhitneyDecomposition {
    pub cubes: Vec<WhitneyCube>,
    /// Set when the finest cubes are smaller than the complement's resolution.
    pub resolution_warning: bool,
    pub max_depth: u32,
}

/// Dyadic Whitney decomposition of `region` (a sub-cube of the bounding box).
///
/// A dyadic cube is kept when `diam(Q) <= dist(Q, Omega^c)`; otherwise it is
/// split, down to `max_depth` levels. Because the parent of a kept cube was
/// rejected, kept cubes also satisfy `dist <= 4 diam`, except possibly the
/// root itself, which is rejected with [`Error::RegionNotAdmissible`].
///
/// Every point of the region with `d(x) > 2 diam(Q_max_depth)` is covered.
pub fn whitney_decompose(domain: &DomainModel, region: &Cube, max_depth: u32) -> Result<WhitneyDecomposition> {
    if max_depth < 1 {
        return Err(Error::invalid("max_depth must be at least 1"));
    }
    if region.dim() != domain.dim() {
        return Err(Error::DimensionMismatch { expected: domain.dim(), got: region.dim() });
    }
    if !domain.bounding_box().contains_cube(region, 1e-12 * domain.bounding_box().side) {
        return Err(Error::invalid("region must lie inside the bounding box"));
    }
    let comp = domain.complement();
    let root_dist = comp.distance_to_cube(region);
    if root_dist > 4.0 * region.diam() {
        return Err(Error::RegionNotAdmissible { distance: root_dist, diameter: region.diam() });
    }

    let mut cubes = Vec::new();
    let mut level: Vec<Cube> = vec![region.clone()];
    for depth in 0..=max_depth {
        let mut next = Vec::new();
        for q in level {
            let d = comp.distance_to_cube(&q);
            if d >= q.diam() {
                cubes.push(WhitneyCube { cube: q, dist_to_complement: d });
            } else if depth < max_depth {
                next.extend(q.children());
            }
        }
        level = next;
    }
    cubes.sort_by(|a, b| {
        lex_cmp(&a.cube.min_corner, &b.cube.min_corner).then(a.cube.side.total_cmp(&b.cube.side))
    });
    let finest = region.side / f64::powi(2.0, max_depth as i32);
    Ok(WhitneyDecomposition {
        cubes,
        resolution_warning: finest < comp.resolution(),
        max_depth,
    })
}

/// Centers of all Whitney cubes of the bounding box, the default sample set
/// for the sampled condition checks.
pub fn whitney_centers(domain: &DomainModel, max_depth: u32) -> Result<Vec<super::Point>> {
    let dec = whitney_decompose(domain, domain.bounding_box(), max_depth)?;
    Ok(dec.cubes.iter().map(|w| w.cube.center()).collect())
}
