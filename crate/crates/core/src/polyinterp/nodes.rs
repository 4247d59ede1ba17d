use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::poly::{monomials, poly_space_dim, MultiIndex};
use crate::error::{Error, Result};
use crate::geometry::Point;

/// Largest candidate count accepted by [`SelectionStrategy::Exhaustive`].
pub const EXHAUSTIVE_MAX_CANDIDATES: usize = 18;

/// Relative residual below which a candidate row is treated as dependent.
const RANK_TOL: f64 = 1e-10;

/// An evaluation functional `P -> d^beta P(x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub x: Point,
    pub beta: MultiIndex,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeSet {
    pub nodes: Vec<Node>,
    pub k: u32,
    /// Smallest singular value of the square Hermite matrix.
    pub conditioning: f64,
}

impl NodeSet {
    pub fn dim(&self) -> usize {
        self.nodes.first().map(|n| n.x.dim()).unwrap_or(0)
    }

    pub fn hermite_matrix(&self) -> DMatrix<f64> {
        hermite_matrix(&self.nodes, self.k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionStrategy {
    /// Sequential volume maximization by pivoted Gram–Schmidt.
    Greedy,
    /// Best smallest singular value over all square subsets.
    Exhaustive,
}

/// Row of the Hermite matrix: `v_alpha = alpha!/(alpha-beta)! x^(alpha-beta)`
/// for `beta <= alpha`, zero otherwise, over the monomials of degree `<= k`.
pub fn hermite_row(node: &Node, k: u32) -> Vec<f64> {
    let n = node.x.dim();
    monomials(n, k)
        .iter()
        .map(|alpha| alpha.monomial_derivative(&node.beta, &node.x))
        .collect()
}

pub fn hermite_matrix(nodes: &[Node], k: u32) -> DMatrix<f64> {
    let d = nodes.first().map(|n| poly_space_dim(n.x.dim(), k)).unwrap_or(0);
    let mut m = DMatrix::zeros(nodes.len(), d);
    for (i, node) in nodes.iter().enumerate() {
        for (j, v) in hermite_row(node, k).into_iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    m
}

pub(crate) fn sigma_min(m: &DMatrix<f64>) -> f64 {
    m.singular_values().iter().copied().fold(f64::INFINITY, f64::min)
}

/// All `(x, beta)` with `x` a sample and `|beta| <= k - 1`, samples outermost.
pub fn candidate_nodes(samples: &[Point], k: u32) -> Vec<Node> {
    let Some(first) = samples.first() else {
        return Vec::new();
    };
    let betas = if k == 0 { Vec::new() } else { monomials(first.dim(), k - 1) };
    samples
        .iter()
        .flat_map(|x| {
            betas.iter().map(move |b| Node {
                x: x.clone(),
                beta: b.clone(),
            })
        })
        .collect()
}

/// Chooses `dim P_k` nodes among the candidates built from `samples` so that
/// the Hermite matrix is as well conditioned as the strategy can find.
pub fn select_nodes(samples: &[Point], k: u32, strategy: SelectionStrategy) -> Result<NodeSet> {
    let first = samples.first().ok_or(Error::EmptyInput("select_nodes needs samples"))?;
    if k == 0 {
        return Err(Error::invalid("degree k must be at least 1"));
    }
    let n = first.dim();
    if samples.iter().any(|p| p.dim() != n) {
        return Err(Error::invalid("samples of mixed dimension"));
    }
    let d = poly_space_dim(n, k);
    let candidates = candidate_nodes(samples, k);
    if candidates.len() < d {
        return Err(Error::InterpolationImpossible { rank: candidates.len(), dim: d });
    }
    let rows = hermite_matrix(&candidates, k);
    let chosen = match strategy {
        SelectionStrategy::Greedy => greedy_rows(&rows, d)?,
        SelectionStrategy::Exhaustive => {
            if candidates.len() > EXHAUSTIVE_MAX_CANDIDATES {
                return Err(Error::invalid(format!(
                    "exhaustive selection supports at most {EXHAUSTIVE_MAX_CANDIDATES} candidates, got {}",
                    candidates.len()
                )));
            }
            exhaustive_rows(&rows, d)?
        }
    };
    let nodes: Vec<Node> = chosen.iter().map(|&i| candidates[i].clone()).collect();
    let conditioning = sigma_min(&hermite_matrix(&nodes, k));
    Ok(NodeSet { nodes, k, conditioning })
}

fn greedy_rows(rows: &DMatrix<f64>, d: usize) -> Result<Vec<usize>> {
    let m = rows.nrows();
    let mut resid: Vec<Vec<f64>> = (0..m).map(|i| rows.row(i).iter().copied().collect()).collect();
    let scale = resid
        .iter()
        .map(|r| r.iter().map(|v| v * v).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let mut used = vec![false; m];
    let mut chosen = Vec::with_capacity(d);
    for step in 0..d {
        let (best, norm) = resid
            .par_iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, r)| (i, r.iter().map(|v| v * v).sum::<f64>().sqrt()))
            .reduce(
                || (usize::MAX, -1.0),
                |a, b| if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a },
            );
        if best == usize::MAX || norm <= RANK_TOL * scale {
            return Err(Error::InterpolationImpossible { rank: step, dim: d });
        }
        used[best] = true;
        chosen.push(best);
        let q: Vec<f64> = resid[best].iter().map(|v| v / norm).collect();
        resid.par_iter_mut().for_each(|r| {
            let c: f64 = r.iter().zip(&q).map(|(a, b)| a * b).sum();
            r.iter_mut().zip(&q).for_each(|(a, b)| *a -= c * b);
        });
    }
    chosen.sort_unstable();
    Ok(chosen)
}

fn exhaustive_rows(rows: &DMatrix<f64>, d: usize) -> Result<Vec<usize>> {
    let m = rows.nrows();
    let subsets = combinations(m, d);
    let scale = rows.norm().max(f64::MIN_POSITIVE);
    let (best_idx, best_sigma) = subsets
        .par_iter()
        .enumerate()
        .map(|(idx, s)| (idx, sigma_min(&rows.select_rows(s.iter()))))
        .reduce(
            || (usize::MAX, -1.0),
            |a, b| if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a },
        );
    if best_idx == usize::MAX || best_sigma <= RANK_TOL * scale {
        let rank = rows.clone().rank(RANK_TOL * scale);
        return Err(Error::InterpolationImpossible { rank, dim: d });
    }
    Ok(subsets[best_idx].clone())
}

/// All `d`-subsets of `0..m` in lexicographic order.
fn combinations(m: usize, d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..d).collect();
    if d > m {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = d;
        while i > 0 && cur[i - 1] == m - d + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        cur[i - 1] += 1;
        for j in i..d {
            cur[j] = cur[j - 1] + 1;
        }
    }
}
