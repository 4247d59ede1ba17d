use serde::{Deserialize, Serialize};

use super::boxtree::{Aabb, BoxTree};
use super::sampling::sphere_directions;
use super::shapes::{lex_cmp, Cube, Point, MAX_DIM};
use crate::error::{Error, Result};

/// Cap on the number of lattice representatives emitted for one ball query.
const MAX_LATTICE_SAMPLES: f64 = 2.0e5;

/// How the closed complement is stored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "data")]
pub enum ComplementKind {
    /// Union of closed axis-aligned cubes.
    #[serde(rename = "cells")]
    CellUnion(Vec<Cube>),
    /// Finite set of points (measure zero).
    #[serde(rename = "cloud")]
    PointCloud(Vec<Point>),
}

/// The closed set `Omega^c`, together with a spatial index for exact distance
/// queries. `resolution` is the length scale below which the representation
/// is not trusted.
#[derive(Clone, Debug)]
pub struct ComplementRep {
    dim: usize,
    kind: ComplementKind,
    resolution: f64,
    tree: BoxTree,
}

impl ComplementRep {
    pub fn cells(cells: Vec<Cube>, resolution: f64) -> Result<Self> {
        Self::new(ComplementKind::CellUnion(cells), resolution)
    }

    /// Point cloud complement; duplicate points are rejected.
    pub fn cloud(points: Vec<Point>, resolution: f64) -> Result<Self> {
        Self::new(ComplementKind::PointCloud(points), resolution)
    }

    pub fn new(kind: ComplementKind, resolution: f64) -> Result<Self> {
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(Error::invalid("complement resolution must be positive"));
        }
        let (dim, boxes) = match &kind {
            ComplementKind::CellUnion(cells) => {
                let dim = cells.first().ok_or(Error::ImproperDomain)?.dim();
                let mut boxes = Vec::with_capacity(cells.len());
                for c in cells {
                    if c.dim() != dim {
                        return Err(Error::DimensionMismatch { expected: dim, got: c.dim() });
                    }
                    boxes.push(Aabb::from_corner(&c.min_corner, c.side));
                }
                (dim, boxes)
            }
            ComplementKind::PointCloud(points) => {
                let dim = points.first().ok_or(Error::ImproperDomain)?.dim();
                let mut boxes = Vec::with_capacity(points.len());
                for p in points {
                    if p.dim() != dim {
                        return Err(Error::DimensionMismatch { expected: dim, got: p.dim() });
                    }
                    boxes.push(Aabb::point(p));
                }
                let mut sorted: Vec<&Point> = points.iter().collect();
                sorted.sort_by(|a, b| lex_cmp(a, b));
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    return Err(Error::invalid("point cloud contains duplicate points"));
                }
                (dim, boxes)
            }
        };
        Ok(ComplementRep {
            dim,
            tree: BoxTree::build(dim, boxes),
            kind,
            resolution,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &ComplementKind {
        &self.kind
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.tree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tree.len() == 0
    }

    pub fn has_positive_measure(&self) -> bool {
        matches!(self.kind, ComplementKind::CellUnion(_))
    }

    /// Exact Euclidean distance from `x` to the represented set.
    pub fn distance(&self, x: &[f64]) -> f64 {
        self.tree.nearest(x).map(|(d, _, _)| d).unwrap_or(f64::INFINITY)
    }

    /// Closest point of the set to `x`; exact ties go to the lexicographically smallest.
    pub fn nearest_point(&self, x: &[f64]) -> Option<(Point, f64)> {
        self.tree
            .nearest(x)
            .map(|(d, _, cp)| (Point::from_slice(&cp[..self.dim]), d))
    }

    /// Distance between a cube and the set.
    pub fn distance_to_cube(&self, cube: &Cube) -> f64 {
        self.tree
            .box_distance(&Aabb::from_corner(&cube.min_corner, cube.side))
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.tree.any_contains(x)
    }

    /// Items (cells or points) meeting the closed ball, in storage order.
    pub fn items_in_ball(&self, center: &[f64], radius: f64) -> Vec<usize> {
        self.tree.in_ball(center, radius)
    }

    pub fn cell(&self, i: usize) -> Option<&Cube> {
        match &self.kind {
            ComplementKind::CellUnion(c) => c.get(i),
            ComplementKind::PointCloud(_) => None,
        }
    }

    pub fn point(&self, i: usize) -> Option<&Point> {
        match &self.kind {
            ComplementKind::PointCloud(p) => p.get(i),
            ComplementKind::CellUnion(_) => None,
        }
    }

    /// Finite representatives of the set inside the closed ball `B(center, radius)`.
    ///
    /// Point clouds return their own points. Cell unions return a lattice of
    /// pitch `min(resolution, side)` in every cell (boundary included), plus
    /// sphere points of the same spacing that fall in a cell, so that the
    /// representatives reach the ball's boundary.
    pub fn samples_in_ball(&self, center: &[f64], radius: f64) -> Vec<Point> {
        let items = self.items_in_ball(center, radius);
        let inside = |x: &[f64]| {
            x.iter()
                .zip(center)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                <= radius * radius * (1.0 + 1e-12)
        };
        match &self.kind {
            ComplementKind::PointCloud(points) => {
                items.into_iter().map(|i| points[i].clone()).collect()
            }
            ComplementKind::CellUnion(cells) => {
                let n = self.dim;
                // pitch guard so a huge query cannot blow up
                let covered: f64 = items
                    .iter()
                    .map(|&i| cells[i].side.min(2.0 * radius).powi(n as i32))
                    .sum();
                let mut h = self.resolution.min(radius / 4.0);
                let guard = (covered / MAX_LATTICE_SAMPLES).powf(1.0 / n as f64);
                if guard > h {
                    h = guard;
                }
                let mut out = Vec::new();
                for &i in &items {
                    let c = &cells[i];
                    // restrict the lattice to the part of the cell inside the ball's bounding box
                    let mut lo = [0.0; MAX_DIM];
                    let mut hi = [0.0; MAX_DIM];
                    for k in 0..n {
                        lo[k] = c.min_corner[k].max(center[k] - radius);
                        hi[k] = (c.min_corner[k] + c.side).min(center[k] + radius);
                    }
                    let counts: Vec<usize> = (0..n)
                        .map(|k| (((hi[k] - lo[k]) / h).ceil() as usize).max(1))
                        .collect();
                    let total: usize = counts.iter().map(|m| m + 1).product();
                    for flat in 0..total {
                        let mut rem = flat;
                        let mut p = [0.0; MAX_DIM];
                        for k in 0..n {
                            let idx = rem % (counts[k] + 1);
                            rem /= counts[k] + 1;
                            p[k] = lo[k] + (hi[k] - lo[k]) * idx as f64 / counts[k] as f64;
                        }
                        if inside(&p[..n]) {
                            out.push(Point::from_slice(&p[..n]));
                        }
                    }
                }
                let count = match n {
                    1 => 2,
                    2 => (2.0 * std::f64::consts::PI * radius / h).ceil() as usize,
                    _ => ((4.0 * std::f64::consts::PI * radius * radius / (h * h)).ceil() as usize)
                        .min(20_000),
                };
                for dir in sphere_directions(n, count) {
                    let p: Vec<f64> = (0..n).map(|k| center[k] + radius * dir[k]).collect();
                    if self.tree.any_contains(&p) {
                        out.push(Point::from_slice(&p));
                    }
                }
                out
            }
        }
    }

    /// Representatives whose convex hull approximates that of the set inside
    /// the closed ball: for cell unions, the cell corners in the ball and
    /// sphere points lying in some cell (extreme points of a cube clipped by a
    /// ball are of one of these two kinds). Point clouds return their points.
    pub fn hull_samples_in_ball(&self, center: &[f64], radius: f64) -> Vec<Point> {
        let ComplementKind::CellUnion(cells) = &self.kind else {
            return self.samples_in_ball(center, radius);
        };
        let n = self.dim;
        let r2 = radius * radius * (1.0 + 1e-12);
        let mut out: Vec<Point> = Vec::new();
        for i in self.items_in_ball(center, radius) {
            for c in cells[i].corners() {
                let d2: f64 = c.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                if d2 <= r2 {
                    out.push(c);
                }
            }
        }
        let h = self.resolution.min(radius / 64.0);
        let count = match n {
            1 => 2,
            2 => ((2.0 * std::f64::consts::PI * radius / h).ceil() as usize).min(20_000),
            _ => ((4.0 * std::f64::consts::PI * radius * radius / (h * h)).ceil() as usize).min(20_000),
        };
        for dir in sphere_directions(n, count) {
            let p: Vec<f64> = (0..n).map(|k| center[k] + radius * dir[k]).collect();
            if self.tree.any_contains(&p) {
                out.push(Point::from_slice(&p));
            }
        }
        out.sort_by(|a, b| lex_cmp(a, b));
        out.dedup();
        out
    }

    /// Complement cells inside the open ball, refined dyadically to side at
    /// most `pitch` near the sphere; a refined piece is kept when its center lies in the ball.
    pub fn voxelize_in_ball(&self, center: &[f64], radius: f64, pitch: f64) -> Vec<Cube> {
        let mut out = Vec::new();
        let ComplementKind::CellUnion(cells) = &self.kind else {
            return out;
        };
        let mut stack: Vec<Cube> = self
            .items_in_ball(center, radius)
            .into_iter()
            .rev()
            .map(|i| cells[i].clone())
            .collect();
        while let Some(c) = stack.pop() {
            let near = c.distance_to(center);
            if near >= radius {
                continue;
            }
            let far = c
                .corners()
                .iter()
                .map(|p| p.distance(center))
                .fold(0.0, f64::max);
            if far <= radius {
                out.push(c);
            } else if c.side <= pitch {
                if c.center().distance(center) < radius {
                    out.push(c);
                }
            } else {
                for child in c.children().into_iter().rev() {
                    stack.push(child);
                }
            }
        }
        out
    }

    /// Image of the set under `x -> center + factor (x - center)`.
    pub fn dilate(&self, center: &[f64], factor: f64) -> Result<Self> {
        let kind = match &self.kind {
            ComplementKind::CellUnion(cells) => ComplementKind::CellUnion(
                cells
                    .iter()
                    .map(|c| Cube {
                        min_corner: c.min_corner.scale_about(center, factor),
                        side: c.side * factor,
                    })
                    .collect(),
            ),
            ComplementKind::PointCloud(points) => ComplementKind::PointCloud(
                points.iter().map(|p| p.scale_about(center, factor)).collect(),
            ),
        };
        Self::new(kind, self.resolution * factor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_plane() -> ComplementRep {
        // {y <= 0} tiled inside [-2, 2] x [-2, 0]
        let mut cells = Vec::new();
        for i in 0..8 {
            for j in 0..4 {
                cells.push(
                    Cube::new(Point::from([-2.0 + 0.5 * i as f64, -2.0 + 0.5 * j as f64]), 0.5)
                        .unwrap(),
                );
            }
        }
        ComplementRep::cells(cells, 0.05).unwrap()
    }

    #[test]
    fn half_plane_distance_is_height() {
        let c = half_plane();
        assert!((c.distance(&[0.3, 0.7]) - 0.7).abs() < 1e-15);
        assert_eq!(c.distance(&[0.3, -0.7]), 0.0);
    }

    #[test]
    fn samples_stay_in_ball_and_set() {
        let c = half_plane();
        let s = c.samples_in_ball(&[0.0, 0.5], 1.0);
        assert!(!s.is_empty());
        for p in &s {
            assert!(p.distance(&[0.0, 0.5]) <= 1.0 + 1e-9);
            assert!(p[1] <= 1e-12);
        }
    }

    #[test]
    fn voxelized_cap_volume_close_to_analytic() {
        let c = half_plane();
        let h = 0.5;
        let r = 1.0;
        let vox = c.voxelize_in_ball(&[0.0, h], r, 0.01);
        let v: f64 = vox.iter().map(Cube::volume).sum();
        let cap = r * r * (h / r).acos() - h * (r * r - h * h).sqrt();
        assert!((v - cap).abs() < 0.02 * cap, "{v} vs {cap}");
    }

    #[test]
    fn duplicate_cloud_points_rejected() {
        let p = Point::from([0.0, 0.0]);
        assert!(ComplementRep::cloud(vec![p.clone(), p], 0.1).is_err());
        assert!(matches!(
            ComplementRep::cloud(vec![], 0.1),
            Err(Error::ImproperDomain)
        ));
    }
}
