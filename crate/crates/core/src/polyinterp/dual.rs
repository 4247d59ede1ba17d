use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::nodes::{hermite_matrix, Node, NodeSet};
use super::poly::{eval_with_basis, monomials, poly_space_dim, MultiIndex, Polynomial};
use crate::error::{Error, Result};
use crate::geometry::sampling::{sphere_directions, unit_ball_grid};
use crate::geometry::{width, Point};
use crate::optim::NelderMead;

/// Condition number above which a node set is refused.
pub const MAX_CONDITION: f64 = 1e12;

/// Grid pitch for sup norms on the unit ball in dimensions 1 and 2.
pub const SUP_GRID_PITCH: f64 = 0.01;
/// Grid pitch in dimension 3, where the finer grid is refined locally instead.
pub const SUP_GRID_PITCH_3D: f64 = 0.02;

/// Polynomials `P_(x,beta)` with `d^beta' P_(x,beta)(x') = 1` when the nodes
/// agree and `0` otherwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualBasis {
    pub node_set: NodeSet,
    pub polys: Vec<Polynomial>,
    /// Largest `sup_B |P_(x,beta)|` over the family, B the unit ball.
    pub max_sup_norm: f64,
    pub condition_number: f64,
}

impl DualBasis {
    /// Hermite matrix times coefficient matrix; should be the identity.
    pub fn duality_matrix(&self) -> nalgebra::DMatrix<f64> {
        let h = self.node_set.hermite_matrix();
        let d = self.polys.len();
        let mut c = nalgebra::DMatrix::zeros(d, d);
        for (j, p) in self.polys.iter().enumerate() {
            for (i, v) in p.coeffs.iter().enumerate() {
                c[(i, j)] = *v;
            }
        }
        h * c
    }

    /// Largest entrywise deviation of [`Self::duality_matrix`] from the identity.
    pub fn verify_duality(&self) -> f64 {
        let m = self.duality_matrix();
        let mut worst: f64 = 0.0;
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((m[(i, j)] - target).abs());
            }
        }
        worst
    }
}

/// Solves the Hermite system for every unit right-hand side.
pub fn dual_basis(node_set: &NodeSet) -> Result<DualBasis> {
    let n = node_set.dim();
    let k = node_set.k;
    let d = poly_space_dim(n, k);
    if node_set.nodes.len() != d {
        return Err(Error::invalid(format!(
            "node set has {} nodes, dim P_{k} = {d}",
            node_set.nodes.len()
        )));
    }
    let h = node_set.hermite_matrix();
    let sv = h.singular_values();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned { condition });
    }
    let inv = h
        .clone()
        .try_inverse()
        .ok_or(Error::IllConditioned { condition })?;
    let polys: Vec<Polynomial> = (0..d)
        .map(|j| Polynomial {
            n,
            degree: k,
            coeffs: inv.column(j).iter().copied().collect(),
        })
        .collect();
    let max_sup_norm = sup_norms_on_unit_ball(&polys)
        .into_iter()
        .fold(0.0, f64::max);
    Ok(DualBasis {
        node_set: node_set.clone(),
        polys,
        max_sup_norm,
        condition_number: condition,
    })
}

fn default_pitch(n: usize) -> f64 {
    if n >= 3 {
        SUP_GRID_PITCH_3D
    } else {
        SUP_GRID_PITCH
    }
}

/// `sup_B |P|` over the closed unit ball for each polynomial (all of the same
/// dimension and degree). Grid of pitch 0.01 (0.02 in 3D), plus the sphere,
/// then a local ascent from the best grid point.
pub fn sup_norms_on_unit_ball(polys: &[Polynomial]) -> Vec<f64> {
    let Some(first) = polys.first() else {
        return Vec::new();
    };
    let n = first.n;
    let basis = monomials(n, first.degree);
    let pitch = default_pitch(n);
    let mut pts = unit_ball_grid(n, pitch);
    let sphere_count = match n {
        1 => 2,
        2 => (2.0 * std::f64::consts::PI / pitch) as usize,
        _ => (4.0 * std::f64::consts::PI / (pitch * pitch)) as usize,
    };
    pts.extend(sphere_directions(n, sphere_count));

    // For each polynomial, best value and where it occurred.
    let best: Vec<(f64, usize)> = pts
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let mono: Vec<f64> = basis.iter().map(|a| a.monomial(x)).collect();
            polys
                .iter()
                .map(|p| {
                    let v: f64 = p.coeffs.iter().zip(&mono).map(|(c, m)| c * m).sum();
                    (v.abs(), i)
                })
                .collect::<Vec<_>>()
        })
        .reduce(
            || vec![(0.0, usize::MAX); polys.len()],
            |a, b| {
                a.into_iter()
                    .zip(b)
                    .map(|(x, y)| if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) { y } else { x })
                    .collect()
            },
        );

    polys
        .iter()
        .zip(best)
        .map(|(p, (val, idx))| {
            if n == 1 || idx == usize::MAX {
                return val;
            }
            local_ascent(&basis, &p.coeffs, &pts[idx], pitch).max(val)
        })
        .collect()
}

fn project_to_ball(x: &[f64]) -> Vec<f64> {
    let r: f64 = x.iter().map(|c| c * c).sum::<f64>().sqrt();
    if r > 1.0 {
        x.iter().map(|c| c / r).collect()
    } else {
        x.to_vec()
    }
}

fn local_ascent(basis: &[MultiIndex], coeffs: &[f64], start: &[f64], pitch: f64) -> f64 {
    let nm = NelderMead {
        max_iter: 200,
        f_tol: 1e-14,
        x_tol: 1e-10,
    };
    let (_, v) = nm.minimize(
        |x| -eval_with_basis(basis, coeffs, &project_to_ball(x)).abs(),
        start,
        pitch,
    );
    -v
}

/// `||P||_{C^(k-1)(E)} = max over x in E and |beta| <= k-1 of |d^beta P(x)|`.
fn jet_norm(rows: &nalgebra::DMatrix<f64>, coeffs: &[f64]) -> f64 {
    let c = nalgebra::DVector::from_column_slice(coeffs);
    (rows * c).amax()
}

/// Smallest observed `||P||_{C^(k-1)(E)} / (w(E) ||P||_{L^inf(B)})` over random
/// polynomials of degree `<= k` followed by local minimization, B the unit
/// ball. Returns 0 when `E` has zero width.
pub fn verify_reverse_markov(samples: &[Point], k: u32, trials: usize, seed: u64) -> Result<f64> {
    let first = samples.first().ok_or(Error::EmptyInput("verify_reverse_markov needs samples"))?;
    if k == 0 {
        return Err(Error::invalid("degree k must be at least 1"));
    }
    let n = first.dim();
    let w = width(samples)?.value;
    if w <= 0.0 {
        return Ok(0.0);
    }
    let basis = monomials(n, k);
    let d = basis.len();
    let betas = monomials(n, k - 1);
    let nodes: Vec<Node> = samples
        .iter()
        .flat_map(|x| betas.iter().map(move |b| Node { x: x.clone(), beta: b.clone() }))
        .collect();
    let rows = hermite_matrix(&nodes, k);

    let coarse_pitch = match n {
        1 => 0.01,
        2 => 0.05,
        _ => 0.1,
    };
    let mut coarse = unit_ball_grid(n, coarse_pitch);
    coarse.extend(sphere_directions(n, if n == 2 { 128 } else { 400 }));
    let coarse_rows = value_rows(&basis, &coarse);

    let ratio_coarse = |c: &[f64]| -> f64 {
        let sup = jet_norm(&coarse_rows, c);
        if sup <= 0.0 {
            return f64::INFINITY;
        }
        jet_norm(&rows, c) / (w * sup)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nm = NelderMead {
        max_iter: 60 * d,
        f_tol: 1e-12,
        x_tol: 1e-9,
    };
    let mut candidates: Vec<(f64, Vec<f64>)> = Vec::new();
    for _ in 0..trials.max(1) {
        let mut c: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let l = c.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
        c.iter_mut().for_each(|v| *v /= l);
        let (c, val) = nm.minimize(|x| ratio_coarse(x), &c, 0.2);
        candidates.push((val, c));
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));

    // re-evaluate the best few with the fine sup norm
    let mut best = f64::INFINITY;
    for (_, c) in candidates.iter().take(3) {
        let p = Polynomial { n, degree: k, coeffs: c.clone() };
        let sup = sup_norms_on_unit_ball(std::slice::from_ref(&p))[0];
        if sup > 0.0 {
            best = best.min(jet_norm(&rows, c) / (w * sup));
        }
    }
    Ok(best)
}

fn value_rows(basis: &[MultiIndex], pts: &[Vec<f64>]) -> nalgebra::DMatrix<f64> {
    let mut m = nalgebra::DMatrix::zeros(pts.len(), basis.len());
    for (i, x) in pts.iter().enumerate() {
        for (j, a) in basis.iter().enumerate() {
            m[(i, j)] = a.monomial(x);
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyinterp::{select_nodes, SelectionStrategy};

    fn node(x: f64) -> Node {
        Node { x: Point::from([x]), beta: MultiIndex::zero(1) }
    }

    #[test]
    fn symmetric_pair_gives_hat_functions() {
        let ns = NodeSet { nodes: vec![node(-1.0), node(1.0)], k: 1, conditioning: 0.0 };
        let db = dual_basis(&ns).unwrap();
        // (1 - x)/2 and (1 + x)/2
        assert!((db.polys[0].coeffs[0] - 0.5).abs() < 1e-14);
        assert!((db.polys[0].coeffs[1] + 0.5).abs() < 1e-14);
        assert!((db.polys[1].coeffs[0] - 0.5).abs() < 1e-14);
        assert!((db.polys[1].coeffs[1] - 0.5).abs() < 1e-14);
        assert!((db.max_sup_norm - 1.0).abs() < 1e-12);
        assert!(db.verify_duality() < 1e-12);
    }

    #[test]
    fn narrow_pair_sup_norm_grows_like_inverse_width() {
        for w in [0.5, 0.1, 0.02] {
            let ns = NodeSet { nodes: vec![node(0.0), node(w)], k: 1, conditioning: 0.0 };
            let db = dual_basis(&ns).unwrap();
            // (w - x)/w peaks at x = -1 with value (1 + w)/w
            let expect = (1.0 + w) / w;
            assert!((db.max_sup_norm - expect).abs() < 1e-9 * expect, "{w}");
        }
    }

    #[test]
    fn coincident_nodes_are_ill_conditioned() {
        let ns = NodeSet { nodes: vec![node(0.3), node(0.3)], k: 1, conditioning: 0.0 };
        assert!(matches!(dual_basis(&ns), Err(Error::IllConditioned { .. })));
    }

    #[test]
    fn two_point_reverse_markov_is_one_half() {
        let e = vec![Point::from([-1.0]), Point::from([1.0])];
        let r = verify_reverse_markov(&e, 1, 10, 7).unwrap();
        assert!((r - 0.5).abs() < 1e-6, "{r}");
    }

    #[test]
    fn duality_in_two_dims() {
        let samples: Vec<Point> = (0..12)
            .map(|i| {
                let t = i as f64 * 0.523;
                Point::from([0.8 * t.cos(), 0.6 * t.sin()])
            })
            .collect();
        let ns = select_nodes(&samples, 2, SelectionStrategy::Greedy).unwrap();
        let db = dual_basis(&ns).unwrap();
        assert!(db.verify_duality() < 1e-8);
    }
}
