use crate::extension::ExtendedDistribution;
use crate::maximal::gauss_legendre;
use crate::polyinterp::{binomial, MultiIndex, Polynomial};

use super::lipschitz::LipWitness;

/// Step for the default finite-difference derivatives.
const FD_STEP: f64 = 1e-4;

/// A function that can be paired with an extended distribution.
pub trait TestFunction: Sync {
    fn value(&self, x: &[f64]) -> f64;

    /// `∂^beta f(x)`; central differences unless overridden.
    fn derivative(&self, beta: &MultiIndex, x: &[f64]) -> f64 {
        central_difference(&|y| self.value(y), beta, x, FD_STEP)
    }
}

/// Tensor-product central difference of order `beta` with step `h`.
pub fn central_difference(f: &dyn Fn(&[f64]) -> f64, beta: &MultiIndex, x: &[f64], h: f64) -> f64 {
    let axes: Vec<(usize, u32)> = beta.0.iter().copied().enumerate().filter(|(_, b)| *b > 0).collect();
    let mut y = x.to_vec();
    fn recurse(f: &dyn Fn(&[f64]) -> f64, axes: &[(usize, u32)], y: &mut Vec<f64>, h: f64) -> f64 {
        let Some(&(axis, order)) = axes.first() else {
            return f(y);
        };
        let base = y[axis];
        let mut s = 0.0;
        for j in 0..=order {
            y[axis] = base + (0.5 * order as f64 - j as f64) * h;
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            s += sign * binomial(order, j) * recurse(f, &axes[1..], y, h);
        }
        y[axis] = base;
        s / h.powi(order as i32)
    }
    recurse(f, &axes, &mut y, h)
}

impl TestFunction for Polynomial {
    fn value(&self, x: &[f64]) -> f64 {
        self.eval(x)
    }

    fn derivative(&self, beta: &MultiIndex, x: &[f64]) -> f64 {
        Polynomial::derivative(self, beta).eval(x)
    }
}

impl TestFunction for LipWitness {
    fn value(&self, x: &[f64]) -> f64 {
        self.eval(x)
    }

    /// Zero where the slab profile vanishes identically; first derivatives
    /// from the profile slope along `nu` and the cutoff's radial derivative.
    fn derivative(&self, beta: &MultiIndex, x: &[f64]) -> f64 {
        let s = self.slab_coordinate(x);
        let reach = beta.order() as f64 * FD_STEP * 2.0;
        if s.abs() + reach < self.epsilon - 2.0 * self.profile.pitch {
            return 0.0;
        }
        match beta.order() {
            0 => self.eval(x),
            1 => {
                let i = beta.0.iter().position(|b| *b == 1).unwrap();
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                let psi = self.cutoff.eval(x, self.a);
                let dpsi = if r > 0.0 {
                    self.cutoff.profile_derivative(r / self.a) * x[i] / (r * self.a)
                } else {
                    0.0
                };
                (self.profile.derivative(s) * self.nu[i] * psi + self.profile.eval(s) * dpsi) / self.normalization
            }
            _ => central_difference(&|y| self.eval(y), beta, x, FD_STEP),
        }
    }
}

/// Wraps a closure of the point as a [`TestFunction`].
pub struct FnTest<F>(pub F);

impl<F: Fn(&[f64]) -> f64 + Sync> TestFunction for FnTest<F> {
    fn value(&self, x: &[f64]) -> f64 {
        (self.0)(x)
    }
}

/// Gauss–Legendre points per axis and subdivisions per axis used on each cell.
const PAIRING_ORDER: usize = 8;
const PAIRING_SPLIT: usize = 2;

/// `⟨f_dist, phi⟩ = ∫ g phi + sum c (-1)^|beta| ∂^beta phi(x)`.
pub fn pairing(dist: &ExtendedDistribution, f: &dyn TestFunction) -> f64 {
    let (nodes, weights) = gauss_legendre(PAIRING_ORDER);
    let n = dist.n;
    let mut total = 0.0;
    for cell in &dist.function_part {
        if cell.value == 0.0 {
            continue;
        }
        let sub = cell.side / PAIRING_SPLIT as f64;
        let half = 0.5 * sub;
        let q = PAIRING_ORDER * PAIRING_SPLIT;
        let mut x = vec![0.0; n];
        let mut s = 0.0;
        for flat in 0..q.pow(n as u32) {
            let mut rem = flat;
            let mut w = 1.0;
            for k in 0..n {
                let i = rem % q;
                rem /= q;
                let (block, node) = (i / PAIRING_ORDER, i % PAIRING_ORDER);
                x[k] = cell.min_corner[k] + block as f64 * sub + half * (1.0 + nodes[node]);
                w *= weights[node];
            }
            s += w * f.value(&x);
        }
        total += cell.value * s * half.powi(n as i32);
    }
    for d in &dist.dirac_terms {
        total += d.c * d.beta.sign() * f.derivative(&d.beta, &d.x);
    }
    total
}
