use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::convolve::{ScaleRange, Smoother, TGrid};
use super::mollifier::Mollifier;
use crate::error::{Error, Result};
use crate::extension::{moments, ExtendedDistribution};
use crate::geometry::{unit_sphere_area, Point};

/// Where the normalized frame sits in the original coordinates:
/// `x = center + radius u`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub center: Point,
    pub radius: f64,
}

impl Frame {
    pub fn to_local(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(self.center.iter()).map(|(a, c)| (a - c) / self.radius).collect()
    }

    pub fn to_global(&self, u: &[f64]) -> Vec<f64> {
        u.iter().zip(self.center.iter()).map(|(a, c)| c + a * self.radius).collect()
    }
}

/// Radius about the enclosing-ball center that contains every cell and Dirac point.
fn support_radius(dist: &ExtendedDistribution) -> f64 {
    let c = &dist.enclosing_ball.center;
    let mut r: f64 = 0.0;
    for cell in &dist.function_part {
        let far = (0..dist.n)
            .map(|i| {
                let a = (cell.min_corner[i] - c[i]).abs();
                let b = (cell.min_corner[i] + cell.side - c[i]).abs();
                a.max(b).powi(2)
            })
            .sum::<f64>()
            .sqrt();
        r = r.max(far);
    }
    for d in &dist.dirac_terms {
        r = r.max(d.x.distance(c));
    }
    r
}

/// `f -> radius^(n/p) f(center + radius .)`: support inside the unit ball at
/// the origin. The `H^p` quasi-norm is unchanged.
pub fn normalize(dist: &ExtendedDistribution) -> (ExtendedDistribution, Frame) {
    let mut radius = support_radius(dist);
    if radius <= 0.0 {
        radius = if dist.enclosing_ball.radius > 0.0 { dist.enclosing_ball.radius } else { 1.0 };
    }
    let center = dist.enclosing_ball.center.clone();
    let neg: Vec<f64> = center.iter().map(|v| -v).collect();
    let out = dist.translated(&neg).dilated(radius);
    (out, Frame { center, radius })
}

/// Sampling layout in the normalized frame: a uniform core cube plus dyadic
/// shells of doubling pitch out to the truncation radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HpGrid {
    pub core_pitch: f64,
    pub core_half_width: f64,
    /// Truncation radius `R` in units of the support radius.
    pub radius: f64,
    pub t_ratio: f64,
}

impl HpGrid {
    pub fn for_dim(n: usize) -> Self {
        let core_pitch = match n {
            1 => 1.0 / 256.0,
            2 => 1.0 / 32.0,
            _ => 1.0 / 8.0,
        };
        HpGrid { core_pitch, core_half_width: 2.0, radius: 64.0, t_ratio: 2f64.powf(0.125) }
    }

    pub fn with_pitch(self, core_pitch: f64) -> Self {
        HpGrid { core_pitch, ..self }
    }

    pub fn with_radius(self, radius: f64) -> Self {
        HpGrid { radius, ..self }
    }

    pub fn with_t_ratio(self, t_ratio: f64) -> Self {
        HpGrid { t_ratio, ..self }
    }

    fn cells_per_axis(&self) -> Result<usize> {
        let m = 2.0 * self.core_half_width / self.core_pitch;
        let rounded = m.round();
        if !(self.core_pitch > 0.0 && self.radius > self.core_half_width)
            || (m - rounded).abs() > 1e-9 * m
            || !(rounded as usize).is_multiple_of(4)
        {
            return Err(Error::invalid(format!(
                "grid needs 2 * half_width / pitch to be a multiple of 4 and radius > half_width \
                 (pitch {}, half_width {}, radius {})",
                self.core_pitch, self.core_half_width, self.radius
            )));
        }
        Ok(rounded as usize)
    }

    /// `[pitch / 4, 4 R]`.
    pub fn t_grid(&self) -> Result<TGrid> {
        TGrid::geometric(self.core_pitch / 4.0, 4.0 * self.radius, self.t_ratio)
    }

    /// Cell-centered sample points inside the ball of radius `R` with their weights.
    pub fn points(&self, n: usize) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
        let m = self.cells_per_axis()?;
        let mut points = Vec::new();
        let mut weights = Vec::new();
        let mut half = self.core_half_width;
        let mut pitch = self.core_pitch;
        let mut level = 0;
        loop {
            let w = pitch.powi(n as i32);
            let total = m.pow(n as u32);
            for flat in 0..total {
                let mut rem = flat;
                let mut idx = [0usize; 3];
                for slot in idx.iter_mut().take(n) {
                    *slot = rem % m;
                    rem /= m;
                }
                if level > 0 && idx[..n].iter().all(|&i| i >= m / 4 && i < 3 * m / 4) {
                    continue;
                }
                let x: Vec<f64> = idx[..n].iter().map(|&i| -half + (i as f64 + 0.5) * pitch).collect();
                if x.iter().map(|v| v * v).sum::<f64>() <= self.radius * self.radius {
                    points.push(x);
                    weights.push(w);
                }
            }
            if half >= self.radius {
                break;
            }
            half *= 2.0;
            pitch *= 2.0;
            level += 1;
        }
        Ok((points, weights))
    }
}

/// `M_phi f` sampled on an [`HpGrid`], in the normalized frame.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MaximalField {
    pub frame: Frame,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub values: Vec<f64>,
    pub argmax_t: Vec<Option<f64>>,
    pub t_grid: TGrid,
    pub truncation_radius: f64,
}

impl MaximalField {
    pub fn compute(dist: &ExtendedDistribution, phi: &Mollifier, grid: &HpGrid) -> Result<Self> {
        let (local, frame) = normalize(dist);
        let smoother = Smoother::new(&local, phi)?;
        let t_grid = grid.t_grid()?;
        let (points, weights) = grid.points(dist.n)?;
        let evaluated: Vec<_> = points
            .par_iter()
            .map(|x| smoother.maximal(x, &t_grid, ScaleRange::All))
            .collect();
        Ok(MaximalField {
            frame,
            values: evaluated.iter().map(|m| m.value).collect(),
            argmax_t: evaluated.iter().map(|m| m.argmax_t).collect(),
            points,
            weights,
            t_grid,
            truncation_radius: grid.radius,
        })
    }

    /// `sum M^p w` in a fixed pairwise order.
    pub fn lp_sum(&self, p: f64) -> f64 {
        let terms: Vec<f64> = self
            .values
            .iter()
            .zip(&self.weights)
            .map(|(m, w)| m.powf(p) * w)
            .collect();
        pairwise_sum(&terms)
    }

    /// Counts of argmax scales by `floor(log2 t)` (normalized units).
    pub fn scale_histogram(&self) -> Vec<ScaleBin> {
        let mut bins: std::collections::BTreeMap<i32, usize> = Default::default();
        for t in self.argmax_t.iter().flatten() {
            *bins.entry(t.log2().floor() as i32).or_default() += 1;
        }
        bins.into_iter().map(|(log2_t, count)| ScaleBin { log2_t, count }).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleBin {
    pub log2_t: i32,
    pub count: usize,
}

pub(crate) fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 16 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HpEstimate {
    pub p: f64,
    /// `(sum + tail_bound)^(1/p)`.
    pub estimate: f64,
    /// `sum M^p w` over grid points with `|x| <= R`.
    pub grid_sum: f64,
    /// Integral of the fitted envelope `C |x|^(-(N_p+1+n) p)` beyond `R`.
    pub tail_bound: f64,
    pub tail_constant: f64,
    pub decay_exponent: f64,
    pub grid_points: usize,
    pub frame: Frame,
    pub histogram: Vec<ScaleBin>,
}

/// The `H^p` quasi-norm `||M_phi f||_p`, estimated on `grid` plus an analytic tail.
pub fn hp_quasinorm(dist: &ExtendedDistribution, phi: &Mollifier, grid: &HpGrid) -> Result<HpEstimate> {
    let report = moments(dist, dist.n_p);
    if !report.pass {
        return Err(Error::NotHpCandidate { residual: report.max_abs });
    }
    let p = dist.p.value();
    let n = dist.n as f64;
    let decay = (dist.n_p as f64 + 1.0 + n) * p;
    assert!(decay > n, "p (N_p + 1 + n) > n holds for every p in (0, 1]");
    let field = MaximalField::compute(dist, phi, grid)?;
    let grid_sum = field.lp_sum(p);
    let radius = grid.radius;
    let tail_constant = field
        .points
        .iter()
        .zip(&field.values)
        .filter_map(|(x, m)| {
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            (r >= 0.5 * radius).then(|| m.powf(p) * r.powf(decay))
        })
        .fold(0.0, f64::max);
    let tail_bound = tail_constant * unit_sphere_area(dist.n) * radius.powf(n - decay) / (decay - n);
    Ok(HpEstimate {
        p,
        estimate: (grid_sum + tail_bound).powf(1.0 / p),
        grid_sum,
        tail_bound,
        tail_constant,
        decay_exponent: decay,
        grid_points: field.points.len(),
        frame: field.frame.clone(),
        histogram: field.scale_histogram(),
    })
}

/// `sum M^p w` over the grid without the moment check or tail, for probing
/// how partial sums grow with the truncation radius.
pub fn hp_partial_sum(dist: &ExtendedDistribution, phi: &Mollifier, grid: &HpGrid) -> Result<f64> {
    let field = MaximalField::compute(dist, phi, grid)?;
    Ok(field.lp_sum(dist.p.value()))
}
