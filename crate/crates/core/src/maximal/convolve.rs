use serde::{Deserialize, Serialize};

use super::mollifier::{gauss_legendre, Mollifier};
use crate::error::{Error, Result};
use crate::extension::{box_monomial_integral, ExtendedDistribution};
use crate::geometry::DomainModel;

/// Crossing cells are split until their side drops below `t / CROSSING_DEPTH`.
const CROSSING_DEPTH_2D: f64 = 32.0;
const CROSSING_DEPTH_3D: f64 = 8.0;

/// A geometric ladder of scales.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TGrid {
    pub ratio: f64,
    pub values: Vec<f64>,
}

impl TGrid {
    /// `t_min, t_min r, ...` up to the first value `>= t_max`.
    pub fn geometric(t_min: f64, t_max: f64, ratio: f64) -> Result<Self> {
        if !(t_min > 0.0 && t_max >= t_min && ratio > 1.0) {
            return Err(Error::invalid(format!(
                "scale ladder needs 0 < t_min <= t_max and ratio > 1 (got {t_min}, {t_max}, {ratio})"
            )));
        }
        let steps = ((t_max / t_min).ln() / ratio.ln()).ceil() as i32;
        let values = (0..=steps).map(|i| t_min * ratio.powi(i)).collect();
        Ok(TGrid { ratio, values })
    }

    /// Ratio `2^(1/8)`.
    pub fn standard(t_min: f64, t_max: f64) -> Result<Self> {
        Self::geometric(t_min, t_max, 2f64.powf(0.125))
    }

    /// Same range with the ratio square-rooted.
    pub fn refined(&self) -> Self {
        let ratio = self.ratio.sqrt();
        let t_min = self.values[0];
        let t_max = *self.values.last().unwrap();
        Self::geometric(t_min, t_max, ratio).expect("refining a valid ladder")
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().unwrap()
    }
}

/// Which scales enter the supremum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum ScaleRange {
    /// All `t` on the ladder (`M_phi` on `R^n`).
    All,
    /// Only `t < limit`, typically `d(x)` for the maximal function relative to `Omega`.
    Below { limit: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaximalValue {
    pub value: f64,
    /// Scale achieving the maximum; `None` if every scale gave 0.
    pub argmax_t: Option<f64>,
}

#[derive(Clone, Debug)]
struct Cell {
    lo: Vec<f64>,
    side: f64,
    value: f64,
}

#[derive(Clone, Debug)]
struct Dirac {
    x: Vec<f64>,
    idx: usize,
    order: i32,
    c: f64,
}

/// Precomputed data for evaluating `φ_t * f` at many points and scales.
#[derive(Clone, Debug)]
pub struct Smoother<'a> {
    phi: &'a Mollifier,
    n: usize,
    cells: Vec<Cell>,
    diracs: Vec<Dirac>,
    center: Vec<f64>,
    /// Radius about `center` containing every cell and Dirac point.
    support_radius: f64,
    /// `⟨f, (y - center)^alpha⟩ (-1)^|alpha| / alpha!` for `|alpha| <= 2m`.
    far_coeffs: Vec<f64>,
    orders: Vec<i32>,
    gl_nodes: Vec<f64>,
    gl_weights: Vec<f64>,
}

impl<'a> Smoother<'a> {
    pub fn new(dist: &ExtendedDistribution, phi: &'a Mollifier) -> Result<Self> {
        if dist.n != phi.dim() {
            return Err(Error::DimensionMismatch { expected: dist.n, got: phi.dim() });
        }
        let n = dist.n;
        let center = dist.enclosing_ball.center.coords().to_vec();
        let mut support_radius: f64 = 0.0;
        let cells: Vec<Cell> = dist
            .function_part
            .iter()
            .filter(|c| c.value != 0.0)
            .map(|c| {
                let far = (0..n)
                    .map(|i| {
                        let a = (c.min_corner[i] - center[i]).abs();
                        let b = (c.min_corner[i] + c.side - center[i]).abs();
                        a.max(b).powi(2)
                    })
                    .sum::<f64>()
                    .sqrt();
                support_radius = support_radius.max(far);
                Cell { lo: c.min_corner.coords().to_vec(), side: c.side, value: c.value }
            })
            .collect();
        let mut diracs = Vec::with_capacity(dist.dirac_terms.len());
        for d in &dist.dirac_terms {
            if d.beta.order() >= phi.order() {
                return Err(Error::ProfileTooRough { order: d.beta.order(), profile: phi.order() });
            }
            support_radius = support_radius.max(d.x.distance(&center));
            diracs.push(Dirac {
                x: d.x.coords().to_vec(),
                idx: phi.alpha_index(&d.beta).expect("order below 2m"),
                order: d.beta.order() as i32,
                c: d.c,
            });
        }
        let alphas = phi.alphas();
        let far_coeffs = alphas
            .iter()
            .map(|alpha| {
                let mut mom = 0.0;
                for c in &cells {
                    mom += c.value * box_monomial_integral(&c.lo, c.side, alpha, &center, 1.0);
                }
                for (d, src) in diracs.iter().zip(&dist.dirac_terms) {
                    let shifted: Vec<f64> = d.x.iter().zip(&center).map(|(a, b)| a - b).collect();
                    mom += d.c * src.beta.sign() * alpha.monomial_derivative(&src.beta, &shifted);
                }
                mom * alpha.sign() / alpha.factorial()
            })
            .collect();
        let orders = alphas.iter().map(|a| a.order() as i32).collect();
        let (gl_nodes, gl_weights) = gauss_legendre(phi.order() as usize + 1);
        Ok(Smoother {
            phi,
            n,
            cells,
            diracs,
            center,
            support_radius,
            far_coeffs,
            orders,
            gl_nodes,
            gl_weights,
        })
    }

    pub fn support_center(&self) -> &[f64] {
        &self.center
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    /// Lower bound for the distance from `x0` to the support.
    pub fn distance_lower_bound(&self, x0: &[f64]) -> f64 {
        (dist(x0, &self.center) - self.support_radius).max(0.0)
    }

    /// `(φ_t * f)(x0)`.
    pub fn convolve(&self, t: f64, x0: &[f64]) -> f64 {
        let r0 = dist(x0, &self.center);
        if t <= r0 - self.support_radius {
            return 0.0;
        }
        if t > r0 + self.support_radius * (1.0 + 1e-12) {
            return self.convolve_covering(t, x0);
        }
        self.convolve_function(t, x0) + self.convolve_dirac(t, x0)
    }

    /// The ball `B(x0, t)` contains the whole support, where `φ_t(x0 - .)` is
    /// a polynomial and the convolution is a finite moment expansion.
    fn convolve_covering(&self, t: f64, x0: &[f64]) -> f64 {
        let u: Vec<f64> = x0.iter().zip(&self.center).map(|(a, b)| (a - b) / t).collect();
        let mut s = 0.0;
        for (i, coeff) in self.far_coeffs.iter().enumerate() {
            if *coeff != 0.0 {
                s += coeff * t.powi(-(self.n as i32) - self.orders[i]) * self.phi.polynomial_derivative(i, &u);
            }
        }
        s
    }

    fn convolve_dirac(&self, t: f64, x0: &[f64]) -> f64 {
        // ⟨∂^beta δ_x, φ_t(x0 - .)⟩ = (-1)^|beta| ∂_y^beta φ_t(x0 - y)|_{y=x} = t^(-n-|beta|) (∂^beta φ)((x0 - x)/t)
        let mut s = 0.0;
        let mut u = vec![0.0; self.n];
        for d in &self.diracs {
            for i in 0..self.n {
                u[i] = (x0[i] - d.x[i]) / t;
            }
            s += d.c * t.powi(-(self.n as i32) - d.order) * self.phi.derivative_unchecked(d.idx, &u);
        }
        s
    }

    fn convolve_function(&self, t: f64, x0: &[f64]) -> f64 {
        let min_side = t / if self.n >= 3 { CROSSING_DEPTH_3D } else { CROSSING_DEPTH_2D };
        let mut s = 0.0;
        for c in &self.cells {
            s += c.value * self.cell_integral(&c.lo, c.side, t, x0, min_side);
        }
        s
    }

    /// `∫_cell φ_t(x0 - y) dy`.
    fn cell_integral(&self, lo: &[f64], side: f64, t: f64, x0: &[f64], min_side: f64) -> f64 {
        let mut near = 0.0;
        let mut far = 0.0;
        let mut inside_margin = f64::INFINITY;
        for i in 0..self.n {
            let a = lo[i] - x0[i];
            let b = a + side;
            let d = if a > 0.0 { a } else if b < 0.0 { -b } else { 0.0 };
            near += d * d;
            far += a.abs().max(b.abs()).powi(2);
            inside_margin = inside_margin.min((-a).min(b));
        }
        if near >= t * t {
            return 0.0;
        }
        if inside_margin >= t {
            // ball inside the cell
            return 1.0;
        }
        if far <= t * t || side <= min_side {
            return self.gauss_cell(lo, side, t, x0);
        }
        let half = 0.5 * side;
        let mut s = 0.0;
        let mut child = lo.to_vec();
        for mask in 0..(1usize << self.n) {
            for i in 0..self.n {
                child[i] = lo[i] + if mask >> i & 1 == 1 { half } else { 0.0 };
            }
            s += self.cell_integral(&child, half, t, x0, min_side);
        }
        s
    }

    fn gauss_cell(&self, lo: &[f64], side: f64, t: f64, x0: &[f64]) -> f64 {
        let q = self.gl_nodes.len();
        let half = 0.5 * side;
        let total = q.pow(self.n as u32);
        let mut s = 0.0;
        let mut u = [0.0f64; 3];
        for flat in 0..total {
            let mut rem = flat;
            let mut w = 1.0;
            for i in 0..self.n {
                let k = rem % q;
                rem /= q;
                let y = lo[i] + half * (1.0 + self.gl_nodes[k]);
                u[i] = (x0[i] - y) / t;
                w *= self.gl_weights[k];
            }
            s += w * self.phi.eval(&u[..self.n]);
        }
        s * half.powi(self.n as i32) * t.powi(-(self.n as i32))
    }

    /// `max_t |(φ_t * f)(x0)|` over the ladder, restricted by `range`.
    pub fn maximal(&self, x0: &[f64], t_grid: &TGrid, range: ScaleRange) -> MaximalValue {
        let limit = match range {
            ScaleRange::All => f64::INFINITY,
            ScaleRange::Below { limit } => limit,
        };
        let floor = self.distance_lower_bound(x0);
        let mut best = MaximalValue { value: 0.0, argmax_t: None };
        for &t in &t_grid.values {
            if t >= limit {
                break;
            }
            if t <= floor {
                continue;
            }
            let v = self.convolve(t, x0).abs();
            if v > best.value {
                best = MaximalValue { value: v, argmax_t: Some(t) };
            }
        }
        best
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// `(φ_t * f)(x0)`: function part by cellwise Gauss–Legendre quadrature
/// (exact on cells inside `B(x0, t)`, dyadic refinement on cells crossing its
/// boundary), Dirac part in closed form.
pub fn convolve_at(dist: &ExtendedDistribution, phi: &Mollifier, t: f64, x0: &[f64]) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::invalid(format!("scale must be positive, got {t}")));
    }
    Ok(Smoother::new(dist, phi)?.convolve(t, x0))
}

/// `M_phi f(x0)` over the ladder.
pub fn maximal_at(dist: &ExtendedDistribution, phi: &Mollifier, x0: &[f64], t_grid: &TGrid) -> Result<MaximalValue> {
    Ok(Smoother::new(dist, phi)?.maximal(x0, t_grid, ScaleRange::All))
}

/// The maximal function relative to `Omega`: only scales `t < d(x0)` enter.
/// The definition is read with `d(x0)` the distance to the complement.
pub fn maximal_at_restricted(
    dist: &ExtendedDistribution,
    phi: &Mollifier,
    x0: &[f64],
    t_grid: &TGrid,
    domain: &DomainModel,
) -> Result<MaximalValue> {
    let limit = domain.distance_to_complement(x0)?;
    Ok(Smoother::new(dist, phi)?.maximal(x0, t_grid, ScaleRange::Below { limit }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::{RationalP, WeightedCell};
    use crate::geometry::Point;
    use crate::polyinterp::MultiIndex;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn phi2() -> Mollifier {
        Mollifier::new(2, 4).unwrap()
    }

    #[test]
    fn dirac_mass_at_origin() {
        let phi = phi2();
        let d = ExtendedDistribution::dirac(RationalP::one(), Point::from([0.0, 0.0]), MultiIndex::zero(2), 1.0);
        for t in [0.5, 1.0, 3.0] {
            let v = convolve_at(&d, &phi, t, &[0.0, 0.0]).unwrap();
            assert!((v - phi.normalization() / (t * t)).abs() < 1e-12);
        }
        assert_eq!(convolve_at(&d, &phi, 0.5, &[1.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn dirac_derivative_matches_pairing() {
        // ⟨∂_1 δ_x, ψ⟩ = -∂_1 ψ(x) with ψ(y) = φ_t(x0 - y)
        let phi = phi2();
        let x = Point::from([0.1, -0.2]);
        let d = ExtendedDistribution::dirac(RationalP::new(1, 2).unwrap(), x.clone(), MultiIndex(vec![1, 0]), 1.0);
        let x0 = [0.3, 0.1];
        let t = 0.7;
        let psi = |y: [f64; 2]| phi.eval(&[(x0[0] - y[0]) / t, (x0[1] - y[1]) / t]) / (t * t);
        let h = 1e-6;
        let fd = -(psi([x[0] + h, x[1]]) - psi([x[0] - h, x[1]])) / (2.0 * h);
        let v = convolve_at(&d, &phi, t, &x0).unwrap();
        assert!((v - fd).abs() < 1e-6 * fd.abs(), "{v} vs {fd}");
    }

    #[test]
    fn function_part_matches_monte_carlo() {
        let phi = phi2();
        let cells = vec![
            WeightedCell { min_corner: Point::from([0.0, 0.0]), side: 0.5, value: 1.0 },
            WeightedCell { min_corner: Point::from([0.5, 0.0]), side: 0.5, value: -2.0 },
        ];
        let d = ExtendedDistribution::function_only(RationalP::one(), cells).unwrap();
        let x0 = [0.6, 0.4];
        let t = 0.45;
        let exact = convolve_at(&d, &phi, t, &x0).unwrap();
        // Monte Carlo over B(x0, t)
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let samples = 400_000;
        let area = std::f64::consts::PI * t * t;
        let mut sum = 0.0;
        let mut sq = 0.0;
        let mut taken = 0;
        while taken < samples {
            let u: [f64; 2] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            if u[0] * u[0] + u[1] * u[1] >= 1.0 {
                continue;
            }
            taken += 1;
            let y = [x0[0] - t * u[0], x0[1] - t * u[1]];
            let g = if (0.0..0.5).contains(&y[1]) {
                if (0.0..0.5).contains(&y[0]) {
                    1.0
                } else if (0.5..1.0).contains(&y[0]) {
                    -2.0
                } else {
                    0.0
                }
            } else {
                0.0
            };
            let v = g * phi.eval(&u) / (t * t) * area;
            sum += v;
            sq += v * v;
        }
        let mean = sum / samples as f64;
        let se = ((sq / samples as f64 - mean * mean) / samples as f64).sqrt();
        assert!((exact - mean).abs() < 3.0 * se, "{exact} vs {mean} ± {se}");
    }

    #[test]
    fn covering_expansion_agrees_with_quadrature() {
        let phi = phi2();
        let cells = vec![
            WeightedCell { min_corner: Point::from([-0.5, -0.5]), side: 0.5, value: 1.0 },
            WeightedCell { min_corner: Point::from([0.0, -0.5]), side: 0.5, value: -0.5 },
            WeightedCell { min_corner: Point::from([0.0, 0.0]), side: 0.5, value: 0.25 },
        ];
        let mut d = ExtendedDistribution::function_only(RationalP::one(), cells).unwrap();
        d.dirac_terms.push(crate::extension::DiracTerm {
            x: Point::from([0.2, -0.1]),
            beta: MultiIndex(vec![0, 1]),
            c: 0.3,
        });
        let s = Smoother::new(&d, &phi).unwrap();
        let x0 = [0.7, 0.3];
        let t = 2.5;
        let a = s.convolve_covering(t, &x0);
        let b = s.convolve_function(t, &x0) + s.convolve_dirac(t, &x0);
        assert!((a - b).abs() < 1e-12 * b.abs().max(1e-3), "{a} vs {b}");
    }

    #[test]
    fn small_scale_inside_cell_is_cell_value() {
        let phi = phi2();
        let cells = vec![WeightedCell { min_corner: Point::from([0.0, 0.0]), side: 1.0, value: 3.0 }];
        let d = ExtendedDistribution::function_only(RationalP::one(), cells).unwrap();
        assert!((convolve_at(&d, &phi, 0.1, &[0.5, 0.5]).unwrap() - 3.0).abs() < 1e-14);
        let grid = TGrid::standard(0.01, 4.0).unwrap();
        let m = maximal_at(&d, &phi, &[0.5, 0.5], &grid).unwrap();
        assert!(m.value >= 3.0 - 1e-12);
    }
}
