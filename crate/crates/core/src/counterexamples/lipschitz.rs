use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{width, Point};
use crate::polyinterp::binomial;

/// `min(log+ |(t - x0)/eps|, log+ |a/t|)`.
pub fn g_log(t: f64, x0: f64, epsilon: f64, a: f64) -> f64 {
    let near = ((t - x0) / epsilon).abs().ln().max(0.0);
    let far = (a / t).abs().ln().max(0.0);
    near.min(far)
}

/// Smooth radial cutoff: 1 on `[0, 1/2]`, 0 from 1 on, with a polynomial
/// transition `1 - S((2s - 1))` where `S` integrates the bump `(4v(1-v))^m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    pub order: u32,
}

impl Default for Cutoff {
    fn default() -> Self {
        Cutoff { order: 5 }
    }
}

impl Cutoff {
    /// `∫_0^u (4v(1-v))^m dv`.
    fn bump_integral(&self, u: f64) -> f64 {
        let m = self.order;
        (0..=m)
            .map(|i| {
                let e = (m + i + 1) as i32;
                binomial(m, i) * if i % 2 == 0 { 1.0 } else { -1.0 } * u.powi(e) / e as f64
            })
            .sum::<f64>()
            * 4f64.powi(m as i32)
    }

    /// Profile `psi(s)` for `s >= 0`.
    pub fn profile(&self, s: f64) -> f64 {
        let s = s.abs();
        if s <= 0.5 {
            1.0
        } else if s >= 1.0 {
            0.0
        } else {
            1.0 - self.bump_integral(2.0 * s - 1.0) / self.bump_integral(1.0)
        }
    }

    /// `psi'(s)` for `s >= 0`.
    pub fn profile_derivative(&self, s: f64) -> f64 {
        let a = s.abs();
        if a <= 0.5 || a >= 1.0 {
            return 0.0;
        }
        let v = 2.0 * a - 1.0;
        let d = -2.0 * (4.0 * v * (1.0 - v)).powi(self.order as i32) / self.bump_integral(1.0);
        if s < 0.0 {
            -d
        } else {
            d
        }
    }

    /// `phi_a(x) = psi(|x| / a)`.
    pub fn eval(&self, x: &[f64], a: f64) -> f64 {
        self.profile(x.iter().map(|v| v * v).sum::<f64>().sqrt() / a)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FkMeta {
    pub k: u32,
    pub epsilon: f64,
    pub a: f64,
    pub x0: f64,
    pub pitch: f64,
    /// `min_J |f_k| / min(log a, log 1/eps)`.
    pub lower_constant: f64,
    pub sup_norm: f64,
}

/// A function of one variable on a uniform grid, linear between nodes and
/// zero outside.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sampled1DFunction {
    pub start: f64,
    pub pitch: f64,
    pub values: Vec<f64>,
    pub meta: FkMeta,
}

impl Sampled1DFunction {
    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |i| self.start + i as f64 * self.pitch)
    }

    pub fn end(&self) -> f64 {
        self.start + (self.values.len() - 1) as f64 * self.pitch
    }

    pub fn eval(&self, x: f64) -> f64 {
        let u = (x - self.start) / self.pitch;
        if !(u >= 0.0) || u > (self.values.len() - 1) as f64 {
            return 0.0;
        }
        let i = (u.floor() as usize).min(self.values.len() - 2);
        let w = u - i as f64;
        (1.0 - w) * self.values[i] + w * self.values[i + 1]
    }

    /// Slope of the interpolant (right derivative at nodes).
    pub fn derivative(&self, x: f64) -> f64 {
        let u = (x - self.start) / self.pitch;
        if !(u >= 0.0) || u >= (self.values.len() - 1) as f64 {
            return 0.0;
        }
        let i = u.floor() as usize;
        (self.values[i + 1] - self.values[i]) / self.pitch
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

/// Largest supported `k` for the iterated integrals.
pub const MAX_FK_ORDER: u32 = 4;

/// `f_k`: start from `g_log`, then `k` times integrate from `x0` (cumulative
/// trapezoid) and multiply by the cutoff `phi_a`. Vanishes on
/// `[x0 - eps, x0 + eps]` and outside `[-a, a]`.
pub fn build_fk(k: u32, epsilon: f64, a: f64, x0: f64, pitch: f64) -> Result<Sampled1DFunction> {
    if !(1..=MAX_FK_ORDER).contains(&k) {
        return Err(Error::invalid(format!("k must be in 1..={MAX_FK_ORDER}, got {k}")));
    }
    if !(epsilon > 0.0 && epsilon < 0.25) {
        return Err(Error::invalid(format!("epsilon must lie in (0, 1/4), got {epsilon}")));
    }
    if !(a > 4.0) {
        return Err(Error::invalid(format!("a must exceed 4, got {a}")));
    }
    if !(x0.abs() + epsilon <= a) {
        return Err(Error::invalid("the interval I must lie in [-a, a]"));
    }
    if !(pitch > 0.0) || pitch > epsilon / 16.0 {
        return Err(Error::PitchTooCoarse { pitch, max: epsilon / 16.0 });
    }
    // nodes x0 + i pitch covering [-a - 1, a + 1]
    let lo = ((-a - 1.0 - x0) / pitch).floor() as i64;
    let hi = ((a + 1.0 - x0) / pitch).ceil() as i64;
    let origin = (-lo) as usize;
    let xs: Vec<f64> = (lo..=hi).map(|i| x0 + i as f64 * pitch).collect();
    let cutoff = Cutoff::default();
    let cut: Vec<f64> = xs.iter().map(|x| cutoff.profile(x / a)).collect();
    let mut f: Vec<f64> = xs.iter().map(|t| g_log(*t, x0, epsilon, a)).collect();
    for _ in 0..k {
        let mut big = vec![0.0; f.len()];
        for i in origin + 1..f.len() {
            big[i] = big[i - 1] + 0.5 * pitch * (f[i - 1] + f[i]);
        }
        for i in (0..origin).rev() {
            big[i] = big[i + 1] - 0.5 * pitch * (f[i] + f[i + 1]);
        }
        f = big.iter().zip(&cut).map(|(v, c)| v * c).collect();
    }
    let scale = a.ln().min(epsilon.recip().ln());
    let lower = xs
        .iter()
        .zip(&f)
        .filter(|(x, _)| (*x - x0).abs() >= 0.5 && x.abs() <= 1.0)
        .map(|(_, v)| v.abs())
        .fold(f64::INFINITY, f64::min);
    let sup_norm = f.iter().map(|v| v.abs()).fold(0.0, f64::max);
    Ok(Sampled1DFunction {
        start: xs[0],
        pitch,
        values: f,
        meta: FkMeta {
            k,
            epsilon,
            a,
            x0,
            pitch,
            lower_constant: if lower.is_finite() { lower / scale } else { f64::NAN },
            sup_norm,
        },
    })
}

/// `x -> f_k(nu . x + c) phi(x / a) / min(log a, log 1/eps)`, a function that
/// vanishes on a slab `|nu . x + c| <= eps` containing `E`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipWitness {
    pub nu: Vec<f64>,
    pub offset: f64,
    pub a: f64,
    pub epsilon: f64,
    /// Width of `E ∩ aB` in direction `nu`.
    pub slab_width: f64,
    pub normalization: f64,
    pub profile: Sampled1DFunction,
    pub cutoff: Cutoff,
}

impl LipWitness {
    pub fn dim(&self) -> usize {
        self.nu.len()
    }

    pub fn slab_coordinate(&self, x: &[f64]) -> f64 {
        x.iter().zip(&self.nu).map(|(a, b)| a * b).sum::<f64>() + self.offset
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let c = self.cutoff.eval(x, self.a);
        if c == 0.0 {
            return 0.0;
        }
        self.profile.eval(self.slab_coordinate(x)) * c / self.normalization
    }

    /// `∫_B |f|` over the unit ball by midpoint quadrature with `per_axis` cells.
    pub fn unit_ball_l1(&self, per_axis: usize) -> f64 {
        unit_ball_integral(self.dim(), per_axis, |x| self.eval(x).abs())
    }
}

/// Midpoint rule over the cells of `[-1, 1]^n` whose centers lie in the unit ball.
pub(crate) fn unit_ball_integral(n: usize, per_axis: usize, f: impl Fn(&[f64]) -> f64) -> f64 {
    let h = 2.0 / per_axis as f64;
    let mut x = vec![0.0; n];
    let mut s = 0.0;
    for flat in 0..per_axis.pow(n as u32) {
        let mut rem = flat;
        for xi in x.iter_mut() {
            *xi = -1.0 + (rem % per_axis) as f64 * h + 0.5 * h;
            rem /= per_axis;
        }
        if x.iter().map(|v| v * v).sum::<f64>() < 1.0 {
            s += f(&x);
        }
    }
    s * h.powi(n as i32)
}

/// Builds the slab witness for `E` (in the frame where `B` is the unit ball).
///
/// The slab direction is the minimal-width direction of `E ∩ aB`, and the
/// offset centers the slab on it. The profile uses `pitch = eps / 32`.
pub fn lip_witness_nd(e_samples: &[Point], a: f64, epsilon: f64, k: u32) -> Result<LipWitness> {
    let n = e_samples.first().map(|p| p.dim()).unwrap_or(0);
    if n == 0 {
        return Err(Error::EmptyInput("lip_witness_nd needs at least one point of E"));
    }
    let inside: Vec<&Point> = e_samples
        .iter()
        .filter(|p| p.iter().map(|v| v * v).sum::<f64>() <= a * a)
        .collect();
    let (nu, lo, hi) = if inside.is_empty() {
        let mut nu = vec![0.0; n];
        nu[0] = 1.0;
        (nu, 0.0, 0.0)
    } else {
        let w = width(&inside)?;
        let proj: Vec<f64> = inside
            .iter()
            .map(|p| p.iter().zip(&w.direction).map(|(a, b)| a * b).sum())
            .collect();
        let lo = proj.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = proj.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (w.direction, lo, hi)
    };
    let slab_width = hi - lo;
    if slab_width >= epsilon {
        return Err(Error::WitnessHypothesisViolated { width: slab_width, epsilon });
    }
    let offset = -0.5 * (lo + hi);
    let profile = build_fk(k, epsilon, a, 0.0, epsilon / 32.0)?;
    Ok(LipWitness {
        nu,
        offset,
        a,
        epsilon,
        slab_width,
        normalization: a.ln().min(epsilon.recip().ln()),
        profile,
        cutoff: Cutoff::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_log_values() {
        assert_eq!(g_log(0.3, 0.3, 0.01, 8.0), 0.0);
        assert_eq!(g_log(8.0, 0.0, 0.01, 8.0), 0.0);
        assert_eq!(g_log(-8.0, 0.0, 0.01, 8.0), 0.0);
        let t = 1.0;
        let direct = (t / 0.01f64).ln().min((8.0f64 / t).ln());
        assert_eq!(g_log(t, 0.0, 0.01, 8.0), direct);
    }

    #[test]
    fn cutoff_profile() {
        let c = Cutoff::default();
        assert_eq!(c.profile(0.3), 1.0);
        assert_eq!(c.profile(1.2), 0.0);
        assert!((c.profile(0.75) - 0.5).abs() < 1e-12);
        assert!((c.profile(1.0 - 1e-9)).abs() < 1e-12);
        let h = 1e-6;
        let fd = (c.profile(0.7 + h) - c.profile(0.7 - h)) / (2.0 * h);
        assert!((fd - c.profile_derivative(0.7)).abs() < 1e-6);
    }

    #[test]
    fn fk_vanishing_set_and_signs() {
        let f = build_fk(1, 0.01, 8.0, 0.0, 0.01 / 16.0).unwrap();
        let mut checked = 0;
        for (x, v) in f.nodes().zip(&f.values) {
            if x.abs() <= 0.01 || x.abs() >= 8.0 {
                assert_eq!(*v, 0.0, "x = {x}");
                checked += 1;
            }
        }
        assert!(checked > 0);
        assert!(f.eval(0.7) > 0.0 && f.eval(-0.7) < 0.0);
        assert!(f.meta.lower_constant > 0.1);
    }

    #[test]
    fn witness_vanishes_on_a_line() {
        let e: Vec<Point> = (0..20).map(|i| Point::from([i as f64 * 0.3 - 3.0, -2.0])).collect();
        let w = lip_witness_nd(&e, 8.0, 0.01, 1).unwrap();
        for p in &e {
            assert_eq!(w.eval(p), 0.0);
        }
        let bad: Vec<Point> = vec![Point::from([0.0, 2.0]), Point::from([0.0, 3.0]), Point::from([1.0, 2.5])];
        assert!(matches!(
            lip_witness_nd(&bad, 8.0, 0.01, 1),
            Err(Error::WitnessHypothesisViolated { .. })
        ));
    }
}
