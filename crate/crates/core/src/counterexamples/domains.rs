use crate::error::{Error, Result};
use crate::geometry::{ComplementRep, Cube, DomainModel, Point};

/// Largest number of complement points a Cantor dust may have.
pub const MAX_DUST_POINTS: usize = 1_000_000;
/// Deepest supported Cantor level.
pub const MAX_DUST_LEVEL: u32 = 6;

/// Endpoints of the `level`-th middle-third stage in `[0, 1]`, increasing.
pub fn cantor_endpoints(level: u32) -> Vec<f64> {
    let denom = 3u64.pow(level);
    let mut starts = vec![0u64];
    for l in 0..level {
        let step = 2 * 3u64.pow(level - l - 1);
        starts = starts.iter().flat_map(|s| [*s, s + step]).collect();
    }
    let len = 1u64;
    let mut out: Vec<f64> = starts
        .iter()
        .flat_map(|s| [*s as f64 / denom as f64, (s + len) as f64 / denom as f64])
        .collect();
    out.dedup();
    out
}

fn dust_points_per_cell(n: usize, level: u32) -> usize {
    (2usize << level).pow(n as u32)
}

/// `R^n` minus the level-`level` Cantor dust of each cell, inside a box twice
/// the size of the cells' bounding cube.
///
/// The complement is the product of stage endpoints, `2^(level+1)` per axis
/// and cell, so it has measure zero.
pub fn cantor_dust_domain(n: usize, level: u32, cells: &[Cube]) -> Result<DomainModel> {
    if !(1..=3).contains(&n) {
        return Err(Error::invalid(format!("dimension must be 1..=3, got {n}")));
    }
    if level > MAX_DUST_LEVEL {
        return Err(Error::invalid(format!("level must be at most {MAX_DUST_LEVEL}, got {level}")));
    }
    if cells.is_empty() {
        return Err(Error::EmptyInput("cantor_dust_domain needs at least one cell"));
    }
    if let Some(c) = cells.iter().find(|c| c.dim() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: c.dim() });
    }
    let total = dust_points_per_cell(n, level) * cells.len();
    if total > MAX_DUST_POINTS {
        let mut suggested = level;
        while suggested > 0 && dust_points_per_cell(n, suggested) * cells.len() > MAX_DUST_POINTS {
            suggested -= 1;
        }
        return Err(Error::CloudTooLarge { points: total, suggested_level: suggested });
    }
    let ends = cantor_endpoints(level);
    let m = ends.len();
    let mut points: Vec<Point> = Vec::with_capacity(total);
    for cell in cells {
        for flat in 0..m.pow(n as u32) {
            let mut rem = flat;
            let coords: Vec<f64> = (0..n)
                .map(|i| {
                    let e = ends[rem % m];
                    rem /= m;
                    cell.min_corner[i] + cell.side * e
                })
                .collect();
            points.push(Point::new(coords)?);
        }
    }
    points.sort_by(|a, b| crate::geometry::lex_cmp(a, b));
    points.dedup();
    let side = cells.iter().map(|c| c.side).fold(f64::INFINITY, f64::min);
    let resolution = side / 3f64.powi(level as i32);
    DomainModel::new(enlarged_bounding_cube(cells), ComplementRep::cloud(points, resolution)?)
}

/// Bounding cube of `cells`, doubled about its center.
fn enlarged_bounding_cube(cells: &[Cube]) -> Cube {
    let n = cells[0].dim();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for c in cells {
        for i in 0..n {
            lo[i] = lo[i].min(c.min_corner[i]);
            hi[i] = hi[i].max(c.min_corner[i] + c.side);
        }
    }
    let side = lo.iter().zip(&hi).map(|(a, b)| b - a).fold(0.0, f64::max);
    let corner: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b) - side).collect();
    Cube { min_corner: Point::new(corner).expect("finite corner"), side: 2.0 * side }
}

/// `R^2` minus the segment `[-half_length, half_length] x {0}`, sampled at
/// `resolution`, in the box `[-2 L, 2 L]^2`.
pub fn segment_domain(half_length: f64, resolution: f64) -> Result<DomainModel> {
    if !(half_length > 0.0 && resolution > 0.0 && resolution <= half_length) {
        return Err(Error::invalid("segment needs 0 < resolution <= half_length"));
    }
    let steps = (2.0 * half_length / resolution).ceil() as usize;
    let points: Vec<Point> = (0..=steps)
        .map(|i| Point::from([-half_length + 2.0 * half_length * i as f64 / steps as f64, 0.0]))
        .collect();
    DomainModel::new(
        Cube::new(Point::from([-2.0 * half_length, -2.0 * half_length]), 4.0 * half_length)?,
        ComplementRep::cloud(points, 2.0 * half_length / steps as f64)?,
    )
}

/// The unit cube `[0, 1]^n`.
pub fn unit_cell(n: usize) -> Cube {
    Cube { min_corner: Point::origin(n), side: 1.0 }
}
