//! Width of a finite point set: the thickness of the thinnest slab containing it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampling::fibonacci_sphere;
use super::shapes::{dot, lex_cmp, norm};
use crate::error::{Error, Result};
use crate::optim::NelderMead;

/// Number of hemisphere directions scanned in dimension three.
pub const SPHERE_SCAN_DIRECTIONS: usize = 12_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Width {
    pub value: f64,
    /// A unit direction achieving `value` (the slab normal).
    pub direction: Vec<f64>,
    /// True when the value comes from direction sampling (n = 3).
    pub approximate: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DirectionalWidth {
    pub value: f64,
    /// The supplied direction was not unit length and was normalized.
    pub renormalized: bool,
}

/// `max_x nu.x - min_x nu.x` over the points.
pub fn directional_width<P: AsRef<[f64]>>(points: &[P], nu: &[f64]) -> Result<DirectionalWidth> {
    if points.is_empty() {
        return Err(Error::EmptyInput("directional_width needs at least one point"));
    }
    let len = norm(nu);
    if !(len > 0.0 && len.is_finite()) {
        return Err(Error::invalid("direction must be a nonzero finite vector"));
    }
    let renormalized = (len - 1.0).abs() > 1e-12;
    let unit: Vec<f64> = nu.iter().map(|c| c / len).collect();
    Ok(DirectionalWidth {
        value: spread(points, &unit),
        renormalized,
    })
}

pub(crate) fn spread<P: AsRef<[f64]>>(points: &[P], nu: &[f64]) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for p in points {
        let t = dot(p.as_ref(), nu);
        lo = lo.min(t);
        hi = hi.max(t);
    }
    hi - lo
}

/// Minimum width over all directions.
///
/// n = 1: the diameter. n = 2: exact, by rotating calipers over the convex
/// hull. n = 3: scan of [`SPHERE_SCAN_DIRECTIONS`] hemisphere directions, the
/// best few refined by Nelder–Mead on the sphere; flagged approximate.
pub fn width<P: AsRef<[f64]> + Sync>(points: &[P]) -> Result<Width> {
    let first = points
        .first()
        .ok_or(Error::EmptyInput("width needs at least one point"))?
        .as_ref();
    let n = first.len();
    if points.iter().any(|p| p.as_ref().len() != n) {
        return Err(Error::invalid("points of mixed dimension"));
    }
    match n {
        1 => Ok(Width {
            value: spread(points, &[1.0]),
            direction: vec![1.0],
            approximate: false,
        }),
        2 => Ok(width_2d(points)),
        3 => Ok(width_3d(points)),
        _ => Err(Error::invalid(format!("unsupported dimension {n}"))),
    }
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Andrew's monotone chain; counterclockwise, no collinear vertices.
pub(crate) fn convex_hull_2d<P: AsRef<[f64]>>(points: &[P]) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = points
        .iter()
        .map(|p| {
            let p = p.as_ref();
            [p[0], p[1]]
        })
        .collect();
    pts.sort_by(|a, b| lex_cmp(a, b));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn width_2d<P: AsRef<[f64]>>(points: &[P]) -> Width {
    let hull = convex_hull_2d(points);
    let normal_of = |a: [f64; 2], b: [f64; 2]| -> Vec<f64> {
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let l = (dx * dx + dy * dy).sqrt();
        vec![-dy / l, dx / l]
    };
    match hull.len() {
        0 | 1 => {
            return Width {
                value: 0.0,
                direction: vec![1.0, 0.0],
                approximate: false,
            }
        }
        2 => {
            return Width {
                value: 0.0,
                direction: normal_of(hull[0], hull[1]),
                approximate: false,
            }
        }
        _ => {}
    }
    let h = hull.len();
    let mut best = f64::INFINITY;
    let mut best_dir = vec![1.0, 0.0];
    let mut j = 1usize;
    for i in 0..h {
        let a = hull[i];
        let b = hull[(i + 1) % h];
        let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
        // advance the antipodal pointer while the area keeps growing
        while cross(a, b, hull[(j + 1) % h]).abs() > cross(a, b, hull[j]).abs() {
            j = (j + 1) % h;
        }
        let d = cross(a, b, hull[j]).abs() / len;
        if d < best {
            best = d;
            best_dir = normal_of(a, b);
        }
    }
    Width {
        value: best,
        direction: best_dir,
        approximate: false,
    }
}

fn width_3d<P: AsRef<[f64]> + Sync>(points: &[P]) -> Width {
    let dirs = fibonacci_sphere(SPHERE_SCAN_DIRECTIONS, true);
    let mut scored: Vec<(f64, usize)> = dirs
        .par_iter()
        .enumerate()
        .map(|(i, d)| (spread(points, d), i))
        .collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut best_val = scored[0].0;
    let mut best_dir = dirs[scored[0].1].clone();
    let nm = NelderMead {
        max_iter: 300,
        f_tol: 1e-14,
        x_tol: 1e-10,
    };
    for &(_, idx) in scored.iter().take(5) {
        let d0 = &dirs[idx];
        let (e1, e2) = tangent_frame(d0);
        let to_dir = |uv: &[f64]| -> Vec<f64> {
            let v: Vec<f64> = (0..3).map(|k| d0[k] + uv[0] * e1[k] + uv[1] * e2[k]).collect();
            let l = norm(&v);
            v.iter().map(|c| c / l).collect()
        };
        let (uv, val) = nm.minimize(|uv| spread(points, &to_dir(uv)), &[0.0, 0.0], 0.02);
        if val < best_val {
            best_val = val;
            best_dir = to_dir(&uv);
        }
    }
    Width {
        value: best_val,
        direction: best_dir,
        approximate: true,
    }
}

fn tangent_frame(d: &[f64]) -> ([f64; 3], [f64; 3]) {
    let a = if d[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let dot_ad = a[0] * d[0] + a[1] * d[1] + a[2] * d[2];
    let mut e1 = [a[0] - dot_ad * d[0], a[1] - dot_ad * d[1], a[2] - dot_ad * d[2]];
    let l = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
    e1.iter_mut().for_each(|c| *c /= l);
    let e2 = [
        d[1] * e1[2] - d[2] * e1[1],
        d[2] * e1[0] - d[0] * e1[2],
        d[0] * e1[1] - d[1] * e1[0],
    ];
    (e1, e2)
}
