use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{whitney_decompose, Cube, DomainModel, Point};
use crate::polyinterp::binomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeminormKind {
    Bmo,
    Lip,
    BmoOmega,
}

/// Where a sampled supremum was attained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SeminormWitness {
    None,
    Offset { x: Vec<f64>, h: Vec<f64> },
    Cube { min_corner: Vec<f64>, side: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeminormReport {
    pub kind: SeminormKind,
    /// Sampled supremum, a lower bound for the true seminorm.
    pub value: f64,
    pub witness: SeminormWitness,
    pub samples: usize,
    /// Samples dropped because a stencil left the sampled region.
    pub skipped: usize,
    /// For `BMO(Omega)`: the interior oscillation and Whitney average terms.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub components: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

/// Sampling plan for [`lip_seminorm`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipSampling {
    /// Base points and stencils must stay in this box.
    pub region: Cube,
    pub h_min: f64,
    pub h_max: f64,
    pub samples: usize,
    /// Half of the base points are drawn from this ball when given.
    pub focus: Option<(Point, f64)>,
    pub seed: u64,
}

impl LipSampling {
    /// Offsets log-uniform over six decades below `h_max`.
    pub fn new(region: Cube, h_max: f64, samples: usize, seed: u64) -> Self {
        LipSampling { region, h_min: h_max * 1e-6, h_max, samples, focus: None, seed }
    }

    /// Raises `h_min` to four grid pitches, below which a sampled function is not resolved.
    pub fn resolved(mut self, pitch: f64) -> Self {
        self.h_min = self.h_min.max(4.0 * pitch).min(self.h_max);
        self
    }

    pub fn with_focus(mut self, center: Point, radius: f64) -> Self {
        self.focus = Some((center, radius));
        self
    }
}

/// `Δ_h^r f(x) = sum_i (-1)^(r-i) C(r, i) f(x + i h)`.
pub fn forward_difference(f: &dyn Fn(&[f64]) -> f64, x: &[f64], h: &[f64], r: u32) -> f64 {
    let mut y = x.to_vec();
    (0..=r)
        .map(|i| {
            for k in 0..x.len() {
                y[k] = x[k] + i as f64 * h[k];
            }
            let sign = if (r - i).is_multiple_of(2) { 1.0 } else { -1.0 };
            sign * binomial(r, i) * f(&y)
        })
        .sum()
}

/// Sampled `sup |Δ_h^([gamma]+1) f(x)| / |h|^gamma`.
///
/// Offsets have log-uniform length in `[h_min, h_max]` (one percent of them
/// exactly `h_max`) and uniform direction.
pub fn lip_seminorm(f: &(dyn Fn(&[f64]) -> f64 + Sync), gamma: f64, plan: &LipSampling) -> Result<SeminormReport> {
    if !(gamma > 0.0) {
        return Err(Error::invalid(format!("gamma must be positive, got {gamma}")));
    }
    if !(plan.h_min > 0.0 && plan.h_max >= plan.h_min) {
        return Err(Error::invalid("offset range needs 0 < h_min <= h_max"));
    }
    let n = plan.region.dim();
    let r = gamma.floor() as u32 + 1;
    let lo = plan.region.min_corner.coords().to_vec();
    let hi = plan.region.max_corner();
    let results: Vec<Option<(f64, Vec<f64>, Vec<f64>)>> = (0..plan.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
            rng.set_stream(i as u64);
            let x: Vec<f64> = match &plan.focus {
                Some((c, rad)) if i % 2 == 1 => {
                    let u = crate::geometry::sampling::uniform_in_unit_ball(&mut rng, n);
                    (0..n).map(|k| c[k] + rad * u[k]).collect()
                }
                _ => (0..n).map(|k| rng.gen_range(lo[k]..hi[k])).collect(),
            };
            let len = if i % 100 == 0 {
                plan.h_max
            } else {
                plan.h_min * (plan.h_max / plan.h_min).powf(rng.gen::<f64>())
            };
            let dir = crate::geometry::sampling::random_unit_vector(&mut rng, n);
            let h: Vec<f64> = dir.iter().map(|d| d * len).collect();
            let inside = |y: &[f64]| y.iter().enumerate().all(|(k, v)| *v >= lo[k] && *v <= hi[k]);
            let end: Vec<f64> = (0..n).map(|k| x[k] + r as f64 * h[k]).collect();
            if !inside(&x) || !inside(&end) {
                return None;
            }
            let ratio = forward_difference(f, &x, &h, r).abs() / len.powf(gamma);
            Some((ratio, x, h))
        })
        .collect();
    let skipped = results.iter().filter(|r| r.is_none()).count();
    let mut best = (0.0, SeminormWitness::None);
    for (ratio, x, h) in results.into_iter().flatten() {
        if ratio > best.0 {
            best = (ratio, SeminormWitness::Offset { x, h });
        }
    }
    Ok(SeminormReport {
        kind: SeminormKind::Lip,
        value: best.0,
        witness: best.1,
        samples: plan.samples,
        skipped,
        components: None,
        gamma: Some(gamma),
    })
}

/// Cell-centered values on a uniform grid, first axis fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub origin: Vec<f64>,
    pub pitch: f64,
    pub shape: Vec<usize>,
    pub values: Vec<f64>,
}

impl GridFunction {
    /// Samples `f` at cell centers of `cells` per axis covering `region`.
    pub fn sample(f: impl Fn(&[f64]) -> f64 + Sync, region: &Cube, cells: usize) -> Self {
        let n = region.dim();
        let pitch = region.side / cells as f64;
        let origin = region.min_corner.coords().to_vec();
        let values = (0..cells.pow(n as u32))
            .into_par_iter()
            .map(|flat| {
                let mut rem = flat;
                let x: Vec<f64> = (0..n)
                    .map(|k| {
                        let i = rem % cells;
                        rem /= cells;
                        origin[k] + (i as f64 + 0.5) * pitch
                    })
                    .collect();
                f(&x)
            })
            .collect();
        GridFunction { origin, pitch, shape: vec![cells; n], values }
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    fn index(&self, idx: &[usize]) -> usize {
        let mut flat = 0;
        for k in (0..idx.len()).rev() {
            flat = flat * self.shape[k] + idx[k];
        }
        flat
    }

    fn cube_values(&self, start: &[usize], side: usize) -> Vec<f64> {
        let n = self.dim();
        let mut out = Vec::with_capacity(side.pow(n as u32));
        let mut idx = vec![0; n];
        for flat in 0..side.pow(n as u32) {
            let mut rem = flat;
            for k in 0..n {
                idx[k] = start[k] + rem % side;
                rem /= side;
            }
            out.push(self.values[self.index(&idx)]);
        }
        out
    }

    /// Mean oscillation over the aligned cube of `side` cells at `start`.
    pub fn mean_oscillation(&self, start: &[usize], side: usize) -> f64 {
        let v = self.cube_values(start, side);
        let avg = v.iter().sum::<f64>() / v.len() as f64;
        v.iter().map(|x| (x - avg).abs()).sum::<f64>() / v.len() as f64
    }
}

/// Sampled `sup_Q (1/|Q|) ∫_Q |f - f_Q|` over all dyadic-aligned cubes of the
/// grid plus `random_cubes` cubes of random position and size.
pub fn bmo_seminorm(f: &GridFunction, random_cubes: usize, seed: u64) -> Result<SeminormReport> {
    let n = f.dim();
    if n == 0 || f.values.len() != f.shape.iter().product::<usize>() {
        return Err(Error::invalid("grid function shape does not match its values"));
    }
    let min_extent = *f.shape.iter().min().unwrap();
    let mut cubes: Vec<(Vec<usize>, usize)> = Vec::new();
    let mut side = 2;
    while side <= min_extent {
        let counts: Vec<usize> = f.shape.iter().map(|s| s / side).collect();
        let total: usize = counts.iter().product();
        for flat in 0..total {
            let mut rem = flat;
            let start = counts
                .iter()
                .map(|c| {
                    let i = rem % c;
                    rem /= c;
                    i * side
                })
                .collect();
            cubes.push((start, side));
        }
        side *= 2;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random_cubes {
        let side = rng.gen_range(2..=min_extent.max(2)).min(min_extent);
        let start = f.shape.iter().map(|s| rng.gen_range(0..=s - side)).collect();
        cubes.push((start, side));
    }
    let osc: Vec<f64> = cubes.par_iter().map(|(s, side)| f.mean_oscillation(s, *side)).collect();
    let mut best = (0.0, SeminormWitness::None);
    for ((start, side), v) in cubes.iter().zip(&osc) {
        if *v > best.0 {
            let min_corner = (0..n).map(|k| f.origin[k] + start[k] as f64 * f.pitch).collect();
            best = (*v, SeminormWitness::Cube { min_corner, side: *side as f64 * f.pitch });
        }
    }
    Ok(SeminormReport {
        kind: SeminormKind::Bmo,
        value: best.0,
        witness: best.1,
        samples: cubes.len(),
        skipped: 0,
        components: None,
        gamma: None,
    })
}

/// Sampling plan for [`bmo_omega_seminorm`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BmoOmegaSampling {
    pub interior_cubes: usize,
    /// Midpoint-rule cells per axis inside each cube.
    pub quadrature: usize,
    pub whitney_depth: u32,
    pub seed: u64,
}

impl Default for BmoOmegaSampling {
    fn default() -> Self {
        BmoOmegaSampling { interior_cubes: 2000, quadrature: 8, whitney_depth: 6, seed: 0 }
    }
}

fn cube_samples(f: &(dyn Fn(&[f64]) -> f64 + Sync), cube: &Cube, q: usize) -> Vec<f64> {
    let n = cube.dim();
    let h = cube.side / q as f64;
    (0..q.pow(n as u32))
        .map(|flat| {
            let mut rem = flat;
            let x: Vec<f64> = (0..n)
                .map(|k| {
                    let i = rem % q;
                    rem /= q;
                    cube.min_corner[k] + (i as f64 + 0.5) * h
                })
                .collect();
            f(&x)
        })
        .collect()
}

/// `sup_{2Q ⊂ Omega} osc_Q f + sup_{Q Whitney} (1/|Q|) ∫_Q |f|`, both sampled.
pub fn bmo_omega_seminorm(
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    domain: &DomainModel,
    plan: &BmoOmegaSampling,
) -> Result<SeminormReport> {
    let n = domain.dim();
    let bbox = domain.bounding_box();
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let mut interior = Vec::with_capacity(plan.interior_cubes);
    let mut skipped = 0;
    for _ in 0..plan.interior_cubes {
        let x: Vec<f64> = (0..n)
            .map(|k| bbox.min_corner[k] + rng.gen::<f64>() * bbox.side)
            .collect();
        let u: f64 = 10f64.powf(-3.0 * rng.gen::<f64>());
        match domain.distance_to_complement(&x) {
            Ok(d) if d > 0.0 => {
                let side = 0.999 * u * d / (n as f64).sqrt();
                let corner: Vec<f64> = x.iter().map(|v| v - 0.5 * side).collect();
                interior.push(Cube { min_corner: Point::new(corner)?, side });
            }
            _ => skipped += 1,
        }
    }
    let osc: Vec<f64> = interior
        .par_iter()
        .map(|q| {
            let v = cube_samples(f, q, plan.quadrature);
            let avg = v.iter().sum::<f64>() / v.len() as f64;
            v.iter().map(|x| (x - avg).abs()).sum::<f64>() / v.len() as f64
        })
        .collect();
    let whitney = whitney_decompose(domain, bbox, plan.whitney_depth)?;
    let means: Vec<f64> = whitney
        .cubes
        .par_iter()
        .map(|w| {
            let v = cube_samples(f, &w.cube, plan.quadrature);
            v.iter().map(|x| x.abs()).sum::<f64>() / v.len() as f64
        })
        .collect();
    let mut first = (0.0, SeminormWitness::None);
    for (q, v) in interior.iter().zip(&osc) {
        if *v > first.0 {
            first = (*v, SeminormWitness::Cube { min_corner: q.min_corner.coords().to_vec(), side: q.side });
        }
    }
    let mut second = (0.0, SeminormWitness::None);
    for (w, v) in whitney.cubes.iter().zip(&means) {
        if *v > second.0 {
            second = (*v, SeminormWitness::Cube { min_corner: w.cube.min_corner.coords().to_vec(), side: w.cube.side });
        }
    }
    let witness = if first.0 >= second.0 { first.1 } else { second.1 };
    Ok(SeminormReport {
        kind: SeminormKind::BmoOmega,
        value: first.0 + second.0,
        witness,
        samples: interior.len() + whitney.cubes.len(),
        skipped,
        components: Some((first.0, second.0)),
        gamma: None,
    })
}
