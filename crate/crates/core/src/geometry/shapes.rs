use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ops::Deref;

use crate::error::{Error, Result};

/// Largest ambient dimension supported throughout the crate.
pub const MAX_DIM: usize = 3;

/// A point of R^n, n in {1, 2, 3}, with finite coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() || coords.len() > MAX_DIM {
            return Err(Error::invalid(format!(
                "point dimension must be 1..=3, got {}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("point coordinates must be finite"));
        }
        Ok(Point(coords))
    }

    /// Builds a point from a slice already known to be valid.
    pub(crate) fn from_slice(coords: &[f64]) -> Self {
        debug_assert!(!coords.is_empty() && coords.len() <= MAX_DIM);
        Point(coords.to_vec())
    }

    pub fn origin(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn distance(&self, other: &[f64]) -> f64 {
        dist(&self.0, other)
    }

    pub fn translate(&self, offset: &[f64]) -> Point {
        Point(self.0.iter().zip(offset).map(|(a, b)| a + b).collect())
    }

    pub fn scale_about(&self, center: &[f64], factor: f64) -> Point {
        Point(
            self.0
                .iter()
                .zip(center)
                .map(|(a, c)| c + factor * (a - c))
                .collect(),
        )
    }
}

impl Deref for Point {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Point::new(v)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Vec<f64> {
        p.0
    }
}

impl<const N: usize> From<[f64; N]> for Point {
    fn from(a: [f64; N]) -> Self {
        Point::new(a.to_vec()).expect("array point must have 1..=3 finite coordinates")
    }
}

/// Axis-aligned closed cube `[min, min + side]^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cube {
    pub min_corner: Point,
    pub side: f64,
}

impl Cube {
    pub fn new(min_corner: Point, side: f64) -> Result<Self> {
        if !(side > 0.0 && side.is_finite()) {
            return Err(Error::invalid(format!("cube side must be positive, got {side}")));
        }
        Ok(Cube { min_corner, side })
    }

    pub fn dim(&self) -> usize {
        self.min_corner.dim()
    }

    pub fn center(&self) -> Point {
        Point(self.min_corner.iter().map(|c| c + 0.5 * self.side).collect())
    }

    pub fn max_corner(&self) -> Vec<f64> {
        self.min_corner.iter().map(|c| c + self.side).collect()
    }

    pub fn diam(&self) -> f64 {
        self.side * (self.dim() as f64).sqrt()
    }

    pub fn volume(&self) -> f64 {
        self.side.powi(self.dim() as i32)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.min_corner
            .iter()
            .zip(x)
            .all(|(lo, xi)| *xi >= *lo && *xi <= lo + self.side)
    }

    pub fn contains_cube(&self, other: &Cube, tol: f64) -> bool {
        self.min_corner
            .iter()
            .zip(other.min_corner.iter())
            .all(|(a, b)| *b >= a - tol && b + other.side <= a + self.side + tol)
    }

    /// Euclidean distance from `x` to the cube (0 inside).
    pub fn distance_to(&self, x: &[f64]) -> f64 {
        box_point_distance(&self.min_corner, self.side, x)
    }

    pub fn closest_point(&self, x: &[f64]) -> Point {
        Point(
            self.min_corner
                .iter()
                .zip(x)
                .map(|(lo, xi)| xi.clamp(*lo, lo + self.side))
                .collect(),
        )
    }

    /// The 2^n dyadic children, ordered lexicographically by corner.
    pub fn children(&self) -> Vec<Cube> {
        let n = self.dim();
        let half = 0.5 * self.side;
        let mut out = Vec::with_capacity(1 << n);
        for mask in 0..(1usize << n) {
            let corner: Vec<f64> = (0..n)
                .map(|i| {
                    // first coordinate is the most significant for lexicographic order
                    let bit = (mask >> (n - 1 - i)) & 1;
                    self.min_corner[i] + half * bit as f64
                })
                .collect();
            out.push(Cube {
                min_corner: Point(corner),
                side: half,
            });
        }
        out
    }

    /// Splits into `m^n` congruent cells, first coordinate varying fastest.
    pub fn subgrid(&self, m: usize) -> Vec<Cube> {
        let n = self.dim();
        let h = self.side / m as f64;
        let total = m.pow(n as u32);
        (0..total)
            .map(|flat| {
                let mut rem = flat;
                let corner = (0..n)
                    .map(|i| {
                        let idx = rem % m;
                        rem /= m;
                        self.min_corner[i] + h * idx as f64
                    })
                    .collect();
                Cube {
                    min_corner: Point(corner),
                    side: h,
                }
            })
            .collect()
    }

    pub fn corners(&self) -> Vec<Point> {
        let n = self.dim();
        (0..(1usize << n))
            .map(|mask| {
                Point(
                    (0..n)
                        .map(|i| self.min_corner[i] + self.side * ((mask >> i) & 1) as f64)
                        .collect(),
                )
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Ball { center, radius })
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.center.distance(x) < self.radius
    }

    pub fn contains_closed(&self, x: &[f64]) -> bool {
        self.center.distance(x) <= self.radius
    }

    pub fn volume(&self) -> f64 {
        unit_ball_volume(self.dim()) * self.radius.powi(self.dim() as i32)
    }
}

/// Volume of the unit ball of R^n.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        2 => PI,
        3 => 4.0 * PI / 3.0,
        _ => 2.0 * PI / n as f64 * unit_ball_volume(n - 2),
    }
}

/// Surface area of the unit sphere in R^n.
pub fn unit_sphere_area(n: usize) -> f64 {
    n as f64 * unit_ball_volume(n)
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn box_point_distance(lo: &[f64], side: f64, x: &[f64]) -> f64 {
    lo.iter()
        .zip(x)
        .map(|(l, xi)| {
            let d = if *xi < *l {
                l - xi
            } else if *xi > l + side {
                xi - l - side
            } else {
                0.0
            };
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Lexicographic comparison of coordinate slices.
pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn children_are_lexicographic_and_tile_parent() {
        let q = Cube::new(Point::from([0.0, 0.0]), 2.0).unwrap();
        let kids = q.children();
        let corners: Vec<_> = kids.iter().map(|c| c.min_corner.coords().to_vec()).collect();
        assert_eq!(
            corners,
            vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]]
        );
        let vol: f64 = kids.iter().map(Cube::volume).sum();
        assert!((vol - q.volume()).abs() < 1e-15);
    }

    #[test]
    fn box_distance_matches_closest_point() {
        let q = Cube::new(Point::from([1.0, -1.0, 0.5]), 0.5).unwrap();
        let x = [3.0, 0.0, 0.7];
        let c = q.closest_point(&x);
        assert!((q.distance_to(&x) - c.distance(&x)).abs() < 1e-15);
        assert_eq!(q.distance_to(&[1.2, -0.9, 0.6]), 0.0);
    }

    #[test]
    fn rejects_bad_points() {
        assert!(Point::new(vec![]).is_err());
        assert!(Point::new(vec![0.0; 4]).is_err());
        assert!(Point::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn ball_volumes() {
        assert!((unit_ball_volume(3) - 4.18879020478639).abs() < 1e-12);
        let b = Ball::new(Point::from([0.0, 0.0]), 2.0).unwrap();
        assert!((b.volume() - 4.0 * PI).abs() < 1e-12);
    }
}
