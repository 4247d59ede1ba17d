use rand::Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;

use super::rational::RationalP;
use crate::error::{Error, Result};
use crate::geometry::{Cube, DomainModel, WhitneyCube};

/// Largest number of subdivisions per axis of an atom's support.
pub const MAX_SUBDIVISIONS: usize = 16;

const SIZE_TOL: f64 = 1e-12;
const WHITNEY_TOL: f64 = 1e-9;

/// A `(p, Omega)`-atom: a function on a Whitney cube, constant on the cells of
/// an `m^n` subgrid, with `||g||_inf <= |Q|^(-1/p)`.
///
/// Values follow [`Cube::subgrid`] order (first coordinate fastest).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PAtom {
    pub p: RationalP,
    pub support: Cube,
    pub subdivisions: usize,
    pub values: Vec<f64>,
}

impl PAtom {
    /// `|Q|^(-1/p)`.
    pub fn sup_bound(&self) -> f64 {
        self.p.size_bound(self.support.volume())
    }

    pub fn cells(&self) -> Vec<Cube> {
        self.support.subgrid(self.subdivisions)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// `||g||_inf / |Q|^(-1/p)`, at most 1 for a valid atom.
    pub fn size_ratio(&self) -> f64 {
        self.sup_norm() / self.sup_bound()
    }

    pub fn integral(&self) -> f64 {
        let cell_volume = (self.support.side / self.subdivisions as f64).powi(self.support.dim() as i32);
        self.values.iter().sum::<f64>() * cell_volume
    }

    /// Same support, values multiplied by `alpha` (not revalidated).
    pub fn scaled(&self, alpha: f64) -> PAtom {
        PAtom {
            values: self.values.iter().map(|v| v * alpha).collect(),
            ..self.clone()
        }
    }

    /// Values rescaled so that `||g||_inf = |Q|^(-1/p)`.
    pub fn saturated(&self) -> PAtom {
        let s = self.sup_norm();
        if s == 0.0 {
            return self.clone();
        }
        self.scaled(self.sup_bound() / s)
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = Error::read_file(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Schema {
            field: format!("{} (line {}, column {})", path.display(), e.line(), e.column()),
            message: e.to_string(),
        })
    }
}

fn check_shape(support: &Cube, subdivisions: usize, values: &[f64]) -> Result<()> {
    if subdivisions == 0 || subdivisions > MAX_SUBDIVISIONS {
        return Err(Error::invalid(format!(
            "subdivisions must be in 1..={MAX_SUBDIVISIONS}, got {subdivisions}"
        )));
    }
    let expected = subdivisions.pow(support.dim() as u32);
    if values.len() != expected {
        return Err(Error::invalid(format!(
            "atom needs {expected} cell values, got {}",
            values.len()
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("atom values must be finite"));
    }
    Ok(())
}

/// Validates an atom on a Whitney cube of `domain`.
pub fn make_whitney_atom(
    domain: &DomainModel,
    cube: &WhitneyCube,
    subdivisions: usize,
    values: Vec<f64>,
    p: RationalP,
) -> Result<PAtom> {
    if cube.cube.dim() != domain.dim() {
        return Err(Error::DimensionMismatch { expected: domain.dim(), got: cube.cube.dim() });
    }
    check_shape(&cube.cube, subdivisions, &values)?;
    let fresh = WhitneyCube {
        cube: cube.cube.clone(),
        dist_to_complement: domain.complement().distance_to_cube(&cube.cube),
    };
    if !fresh.satisfies_invariant(WHITNEY_TOL) {
        return Err(Error::invalid(format!(
            "support is not a Whitney cube: distance {} for diameter {}",
            fresh.dist_to_complement,
            fresh.cube.diam()
        )));
    }
    let atom = PAtom {
        p,
        support: cube.cube.clone(),
        subdivisions,
        values,
    };
    let ratio = atom.size_ratio();
    if ratio > 1.0 + SIZE_TOL {
        return Err(Error::SizeViolation { ratio });
    }
    Ok(atom)
}

/// Revalidates an atom read from disk against `domain`.
pub fn validate_atom(domain: &DomainModel, atom: &PAtom) -> Result<()> {
    make_whitney_atom(
        domain,
        &WhitneyCube { cube: atom.support.clone(), dist_to_complement: 0.0 },
        atom.subdivisions,
        atom.values.clone(),
        atom.p,
    )
    .map(|_| ())
}

/// Value pattern helpers; each returns values within `[-bound, bound]`.
pub mod patterns {
    use super::*;

    pub fn constant(n: usize, m: usize, bound: f64) -> Vec<f64> {
        vec![bound; m.pow(n as u32)]
    }

    /// `±bound` alternating over the subgrid.
    pub fn checkerboard(n: usize, m: usize, bound: f64) -> Vec<f64> {
        (0..m.pow(n as u32))
            .map(|flat| {
                let mut rem = flat;
                let mut parity = 0;
                for _ in 0..n {
                    parity += rem % m;
                    rem /= m;
                }
                if parity % 2 == 0 {
                    bound
                } else {
                    -bound
                }
            })
            .collect()
    }

    /// Uniform values in `[-bound, bound]`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize, bound: f64) -> Vec<f64> {
        (0..m.pow(n as u32)).map(|_| bound * rng.gen_range(-1.0..=1.0)).collect()
    }

    /// Random signs times `bound`.
    pub fn random_checkerboard<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize, bound: f64) -> Vec<f64> {
        (0..m.pow(n as u32))
            .map(|_| if rng.gen_bool(0.5) { bound } else { -bound })
            .collect()
    }
}
